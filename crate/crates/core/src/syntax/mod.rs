//! Lexing, parsing and canonical rendering of service-definition source.

pub mod ast;
mod lexer;
mod parser;
mod render;
mod token;

pub use ast::*;
pub use lexer::{tokenize, LexError};
pub use parser::{parse_program, ParseError};
pub use render::{render, render_expr, render_path};
pub use token::{Token, TokenKind};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{0}")]
    Lex(#[from] LexError),
    #[error("{0}")]
    Parse(#[from] ParseError),
}

impl SyntaxError {
    pub fn position(&self) -> (u32, u32) {
        match self {
            SyntaxError::Lex(e) => (e.line, e.col),
            SyntaxError::Parse(e) => (e.line, e.col),
        }
    }

    pub fn message(&self) -> String {
        match self {
            SyntaxError::Lex(e) => e.message.clone(),
            SyntaxError::Parse(e) => format!("expected {}, found {}", e.expected, e.found),
        }
    }
}

/// Tokenizes and parses `text` in one step.
pub fn parse_source(text: &str, source_name: &str) -> Result<SourceProgram, SyntaxError> {
    let tokens = tokenize(text)?;
    Ok(parse_program(&tokens, source_name)?)
}
