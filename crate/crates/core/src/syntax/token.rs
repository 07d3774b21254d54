use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident,
    // keywords
    Type,
    Interface,
    Service,
    InputPort,
    OutputPort,
    Execution,
    Main,
    RequestResponse,
    OneWay,
    If,
    Else,
    While,
    Throw,
    True,
    False,
    Void,
    Bool,
    Int,
    Long,
    Double,
    String,
    Any,
    // literals
    IntLit(i32),
    LongLit(i64),
    DoubleLit(f64),
    StrLit(std::string::String),
    // punctuation
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Semi,
    Dot,
    Ellipsis,
    Assign,
    EqEq,
    NotEq,
    Lt,
    LtEq,
    Gt,
    GtEq,
    Plus,
    Minus,
    Star,
    Slash,
    Bang,
    AndAnd,
    OrOr,
    At,
    Question,
    Hash,
}

impl TokenKind {
    pub(crate) fn keyword(word: &str) -> Option<TokenKind> {
        let kind = match word {
            "type" => TokenKind::Type,
            "interface" => TokenKind::Interface,
            "service" => TokenKind::Service,
            "inputPort" => TokenKind::InputPort,
            "outputPort" => TokenKind::OutputPort,
            "execution" => TokenKind::Execution,
            "main" => TokenKind::Main,
            "RequestResponse" => TokenKind::RequestResponse,
            "OneWay" => TokenKind::OneWay,
            "if" => TokenKind::If,
            "else" => TokenKind::Else,
            "while" => TokenKind::While,
            "throw" => TokenKind::Throw,
            "true" => TokenKind::True,
            "false" => TokenKind::False,
            "void" => TokenKind::Void,
            "bool" => TokenKind::Bool,
            "int" => TokenKind::Int,
            "long" => TokenKind::Long,
            "double" => TokenKind::Double,
            "string" => TokenKind::String,
            "any" => TokenKind::Any,
            _ => return None,
        };
        Some(kind)
    }

    pub fn is_keyword(&self) -> bool {
        matches!(
            self,
            TokenKind::Type
                | TokenKind::Interface
                | TokenKind::Service
                | TokenKind::InputPort
                | TokenKind::OutputPort
                | TokenKind::Execution
                | TokenKind::Main
                | TokenKind::RequestResponse
                | TokenKind::OneWay
                | TokenKind::If
                | TokenKind::Else
                | TokenKind::While
                | TokenKind::Throw
                | TokenKind::True
                | TokenKind::False
                | TokenKind::Void
                | TokenKind::Bool
                | TokenKind::Int
                | TokenKind::Long
                | TokenKind::Double
                | TokenKind::String
                | TokenKind::Any
        )
    }
}

/// A lexeme with its kind and 1-based source position.
#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: std::string::String,
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", self.lexeme)
    }
}
