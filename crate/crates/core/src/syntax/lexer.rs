use super::token::{Token, TokenKind};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct LexError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: u32,
    col: u32,
}

/// Splits source text into tokens. Whitespace and both comment styles are
/// dropped.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut lexer = Lexer {
        chars: source.char_indices().peekable(),
        src: source,
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();
    while let Some(token) = lexer.next_token()? {
        tokens.push(token);
    }
    Ok(tokens)
}

impl<'a> Lexer<'a> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek_second(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map(|&(i, _)| i).unwrap_or(self.src.len())
    }

    fn error(&self, line: u32, col: u32, message: impl Into<String>) -> LexError {
        LexError {
            line,
            col,
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) -> Result<(), LexError> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.peek_second() == Some('/') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some('/') if self.peek_second() == Some('*') => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            Some('*') if self.peek() == Some('/') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                            None => {
                                return Err(self.error(line, col, "unterminated block comment"))
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, LexError> {
        self.skip_trivia()?;
        let (line, col) = (self.line, self.col);
        let start = self.offset();
        let Some(c) = self.bump() else {
            return Ok(None);
        };

        let kind = match c {
            '{' => TokenKind::LBrace,
            '}' => TokenKind::RBrace,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '[' => TokenKind::LBracket,
            ']' => TokenKind::RBracket,
            ':' => TokenKind::Colon,
            ',' => TokenKind::Comma,
            ';' => TokenKind::Semi,
            '+' => TokenKind::Plus,
            '-' => TokenKind::Minus,
            '*' => TokenKind::Star,
            '/' => TokenKind::Slash,
            '@' => TokenKind::At,
            '?' => TokenKind::Question,
            '#' => TokenKind::Hash,
            '.' => {
                if self.peek() == Some('.') && self.peek_second() == Some('.') {
                    self.bump();
                    self.bump();
                    TokenKind::Ellipsis
                } else {
                    TokenKind::Dot
                }
            }
            '=' => self.either('=', TokenKind::EqEq, TokenKind::Assign),
            '!' => self.either('=', TokenKind::NotEq, TokenKind::Bang),
            '<' => self.either('=', TokenKind::LtEq, TokenKind::Lt),
            '>' => self.either('=', TokenKind::GtEq, TokenKind::Gt),
            '&' => {
                if self.peek() == Some('&') {
                    self.bump();
                    TokenKind::AndAnd
                } else {
                    return Err(self.error(
                        line,
                        col,
                        "illegal character `&` (did you mean `&&`?)",
                    ));
                }
            }
            '|' => {
                if self.peek() == Some('|') {
                    self.bump();
                    TokenKind::OrOr
                } else {
                    return Err(self.error(
                        line,
                        col,
                        "illegal character `|` (did you mean `||`?)",
                    ));
                }
            }
            '"' => self.string(line, col)?,
            c if c.is_ascii_digit() => self.number(start, line, col)?,
            c if c.is_alphabetic() || c == '_' => {
                while let Some(c) = self.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        self.bump();
                    } else {
                        break;
                    }
                }
                let end = self.offset();
                TokenKind::keyword(&self.src[start..end]).unwrap_or(TokenKind::Ident)
            }
            other => return Err(self.error(line, col, format!("illegal character `{other}`"))),
        };

        let end = self.offset();
        Ok(Some(Token {
            kind,
            lexeme: self.src[start..end].to_string(),
            line,
            col,
        }))
    }

    fn either(&mut self, next: char, two: TokenKind, one: TokenKind) -> TokenKind {
        if self.peek() == Some(next) {
            self.bump();
            two
        } else {
            one
        }
    }

    fn string(&mut self, line: u32, col: u32) -> Result<TokenKind, LexError> {
        let mut value = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => {
                    return Err(self.error(line, col, "unterminated string literal"))
                }
                Some('"') => return Ok(TokenKind::StrLit(value)),
                Some('\\') => {
                    let (el, ec) = (self.line, self.col);
                    match self.bump() {
                        Some('n') => value.push('\n'),
                        Some('t') => value.push('\t'),
                        Some('r') => value.push('\r'),
                        Some('"') => value.push('"'),
                        Some('\\') => value.push('\\'),
                        Some(other) => {
                            return Err(self.error(el, ec, format!("unknown escape `\\{other}`")))
                        }
                        None => return Err(self.error(line, col, "unterminated string literal")),
                    }
                }
                Some(c) => value.push(c),
            }
        }
    }

    fn number(&mut self, start: usize, line: u32, col: u32) -> Result<TokenKind, LexError> {
        self.digits();
        let mut is_double = false;
        if self.peek() == Some('.') && self.peek_second().is_some_and(|c| c.is_ascii_digit()) {
            is_double = true;
            self.bump();
            self.digits();
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let mut ahead = self.chars.clone();
            ahead.next();
            let mut next = ahead.next().map(|(_, c)| c);
            if matches!(next, Some('+' | '-')) {
                next = ahead.next().map(|(_, c)| c);
            }
            if next.is_some_and(|c| c.is_ascii_digit()) {
                is_double = true;
                self.bump();
                if matches!(self.peek(), Some('+' | '-')) {
                    self.bump();
                }
                self.digits();
            }
        }
        let end = self.offset();
        let text = &self.src[start..end];
        if is_double {
            return text
                .parse::<f64>()
                .map(TokenKind::DoubleLit)
                .map_err(|_| self.error(line, col, format!("malformed number `{text}`")));
        }
        if self.peek() == Some('L') {
            self.bump();
            return text.parse::<i64>().map(TokenKind::LongLit).map_err(|_| {
                self.error(line, col, format!("long literal `{text}L` out of range"))
            });
        }
        text.parse::<i32>().map(TokenKind::IntLit).map_err(|_| {
            self.error(
                line,
                col,
                format!("int literal `{text}` out of range (use an `L` suffix)"),
            )
        })
    }

    fn digits(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
    }
}
