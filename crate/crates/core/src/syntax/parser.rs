//! Recursive-descent parser. One token of lookahead is enough everywhere
//! except statement heads, which peek a second token to tell `op@Port`,
//! `op(x)` and `x = e` apart.

use super::ast::*;
use super::token::{Token, TokenKind};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: expected {expected}, found {found}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub expected: String,
    pub found: String,
}

type PResult<T> = Result<T, ParseError>;

/// Builds a [`SourceProgram`] from a token sequence. The first error aborts.
pub fn parse_program(tokens: &[Token], source_name: &str) -> Result<SourceProgram, ParseError> {
    let mut parser = Parser { tokens, pos: 0 };
    let mut declarations = Vec::new();
    while !parser.at_end() {
        declarations.push(parser.declaration()?);
    }
    Ok(SourceProgram {
        source_name: source_name.to_string(),
        declarations,
    })
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

impl<'t> Parser<'t> {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&'t TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn peek_nth_kind(&self, n: usize) -> Option<&'t TokenKind> {
        self.tokens.get(self.pos + n).map(|t| &t.kind)
    }

    fn check(&self, kind: &TokenKind) -> bool {
        self.peek_kind() == Some(kind)
    }

    fn check_word(&self, word: &str) -> bool {
        matches!(self.peek(), Some(t) if t.kind == TokenKind::Ident && t.lexeme == word)
    }

    fn advance(&mut self) -> &'t Token {
        let token = &self.tokens[self.pos];
        self.pos += 1;
        token
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.check(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn span(&self) -> Span {
        match self.peek() {
            Some(t) => Span::new(t.line, t.col),
            None => self.eof_span(),
        }
    }

    fn eof_span(&self) -> Span {
        match self.tokens.last() {
            Some(t) => Span::new(t.line, t.col + t.lexeme.chars().count() as u32),
            None => Span::new(1, 1),
        }
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        let (span, found) = match self.peek() {
            Some(t) => (Span::new(t.line, t.col), format!("`{}`", t.lexeme)),
            None => (self.eof_span(), "end of input".to_string()),
        };
        ParseError {
            line: span.line,
            col: span.col,
            expected: expected.into(),
            found,
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> PResult<&'t Token> {
        if self.check(&kind) {
            Ok(self.advance())
        } else {
            Err(self.error(what))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                self.pos += 1;
                Ok(Ident::new(&t.lexeme, Span::new(t.line, t.col)))
            }
            _ => Err(self.error(what)),
        }
    }

    /// A field or path-step name: identifiers and keywords are both accepted.
    fn name(&mut self, what: &str) -> PResult<Ident> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident || t.kind.is_keyword() => {
                self.pos += 1;
                Ok(Ident::new(&t.lexeme, Span::new(t.line, t.col)))
            }
            _ => Err(self.error(what)),
        }
    }

    fn at_name(&self) -> bool {
        matches!(self.peek_kind(), Some(k) if *k == TokenKind::Ident || k.is_keyword())
    }

    // ---- declarations ----

    fn declaration(&mut self) -> PResult<Declaration> {
        match self.peek_kind() {
            Some(TokenKind::Type) => self.type_decl().map(Declaration::Type),
            Some(TokenKind::Interface) => self.interface_decl().map(Declaration::Interface),
            Some(TokenKind::Service) => self.service_decl().map(Declaration::Service),
            _ => Err(self.error("`type`, `interface` or `service`")),
        }
    }

    fn basic_type(&mut self) -> Option<BasicType> {
        let ty = match self.peek_kind()? {
            TokenKind::Void => BasicType::Void,
            TokenKind::Bool => BasicType::Bool,
            TokenKind::Int => BasicType::Int,
            TokenKind::Long => BasicType::Long,
            TokenKind::Double => BasicType::Double,
            TokenKind::String => BasicType::String,
            TokenKind::Any => BasicType::Any,
            _ => return None,
        };
        self.pos += 1;
        Some(ty)
    }

    fn type_decl(&mut self) -> PResult<TypeDecl> {
        self.expect(TokenKind::Type, "`type`")?;
        let name = self.ident("type name")?;
        let mut root = BasicType::Void;
        let mut fields = Vec::new();
        if self.eat(&TokenKind::Colon) {
            root = self.basic_type().ok_or_else(|| self.error("basic type"))?;
            if self.check(&TokenKind::LBrace) {
                fields = self.field_block()?;
            }
        } else if self.check(&TokenKind::LBrace) {
            fields = self.field_block()?;
        } else {
            return Err(self.error("`:` or `{`"));
        }
        Ok(TypeDecl { name, root, fields })
    }

    fn field_block(&mut self) -> PResult<Vec<FieldDecl>> {
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut fields = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            if !self.at_name() {
                return Err(self.error("field name or `}`"));
            }
            fields.push(self.field()?);
        }
        Ok(fields)
    }

    fn field(&mut self) -> PResult<FieldDecl> {
        let name = self.name("field name")?;
        let cardinality = if self.eat(&TokenKind::Question) {
            Cardinality::Optional
        } else if self.eat(&TokenKind::Star) {
            Cardinality::Many
        } else {
            Cardinality::One
        };
        self.expect(TokenKind::Colon, "`:`")?;
        let ty = self.type_ref()?;
        Ok(FieldDecl {
            name,
            cardinality,
            ty,
        })
    }

    fn type_ref(&mut self) -> PResult<TypeRef> {
        if let Some(basic) = self.basic_type() {
            if self.check(&TokenKind::LBrace) {
                let fields = self.field_block()?;
                return Ok(TypeRef::Inline {
                    root: basic,
                    fields,
                });
            }
            return Ok(TypeRef::Basic(basic));
        }
        self.ident("type").map(TypeRef::Named)
    }

    fn interface_decl(&mut self) -> PResult<InterfaceDecl> {
        self.expect(TokenKind::Interface, "`interface`")?;
        let name = self.ident("interface name")?;
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut decl = InterfaceDecl {
            name,
            request_responses: Vec::new(),
            one_ways: Vec::new(),
        };
        loop {
            if self.eat(&TokenKind::RBrace) {
                return Ok(decl);
            }
            if self.eat(&TokenKind::RequestResponse) {
                self.expect(TokenKind::Colon, "`:`")?;
                loop {
                    let name = self.ident("operation name")?;
                    let request = self.paren_type()?;
                    let response = self.paren_type()?;
                    decl.request_responses.push(RequestResponseOp {
                        name,
                        request,
                        response,
                    });
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
            } else if self.eat(&TokenKind::OneWay) {
                self.expect(TokenKind::Colon, "`:`")?;
                loop {
                    let name = self.ident("operation name")?;
                    let request = self.paren_type()?;
                    decl.one_ways.push(OneWayOp { name, request });
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
            } else {
                return Err(self.error("`RequestResponse`, `OneWay` or `}`"));
            }
        }
    }

    fn paren_type(&mut self) -> PResult<TypeRef> {
        self.expect(TokenKind::LParen, "`(`")?;
        let ty = self.type_ref()?;
        self.expect(TokenKind::RParen, "`)`")?;
        Ok(ty)
    }

    fn service_decl(&mut self) -> PResult<ServiceDecl> {
        self.expect(TokenKind::Service, "`service`")?;
        let name = self.ident("service name")?;
        let mut config = None;
        if self.eat(&TokenKind::LParen) {
            if !self.check(&TokenKind::RParen) {
                let param = self.ident("configuration parameter name")?;
                let ty = if self.eat(&TokenKind::Colon) {
                    Some(self.ident("configuration type name")?)
                } else {
                    None
                };
                config = Some(ConfigParam { name: param, ty });
            }
            self.expect(TokenKind::RParen, "`)`")?;
        }
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut service = ServiceDecl {
            name,
            config,
            execution: None,
            input_ports: Vec::new(),
            output_ports: Vec::new(),
            elided: false,
            main: None,
        };
        loop {
            match self.peek_kind() {
                Some(TokenKind::RBrace) => {
                    self.pos += 1;
                    return Ok(service);
                }
                Some(TokenKind::Execution) => {
                    if service.execution.is_some() {
                        return Err(self.error("at most one `execution` clause"));
                    }
                    self.pos += 1;
                    self.expect(TokenKind::Colon, "`:`")?;
                    let mode = if self.check_word("concurrent") {
                        ExecutionMode::Concurrent
                    } else if self.check_word("sequential") {
                        ExecutionMode::Sequential
                    } else if self.check_word("single") {
                        ExecutionMode::Single
                    } else {
                        return Err(self.error("`concurrent`, `sequential` or `single`"));
                    };
                    self.pos += 1;
                    service.execution = Some(mode);
                }
                Some(TokenKind::InputPort) => {
                    self.pos += 1;
                    let port = self.port(PortKind::Input)?;
                    service.input_ports.push(port);
                }
                Some(TokenKind::OutputPort) => {
                    self.pos += 1;
                    let port = self.port(PortKind::Output)?;
                    service.output_ports.push(port);
                }
                Some(TokenKind::Main) => {
                    if service.main.is_some() {
                        return Err(self.error("at most one `main` block"));
                    }
                    self.pos += 1;
                    service.main = Some(self.behavior()?);
                }
                Some(TokenKind::Ellipsis) => {
                    self.pos += 1;
                    service.elided = true;
                }
                _ => {
                    return Err(
                        self.error("`execution`, `inputPort`, `outputPort`, `main`, `...` or `}`")
                    )
                }
            }
        }
    }

    fn port(&mut self, kind: PortKind) -> PResult<PortDecl> {
        let name = self.ident("port name")?;
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut location: Option<(Expr, Span)> = None;
        let mut protocol = None;
        let mut interfaces: Option<Vec<Ident>> = None;
        loop {
            let Some(token) = self.peek() else {
                return Err(self.error("`}`"));
            };
            if token.kind == TokenKind::RBrace {
                let Some((location, location_span)) = location else {
                    return Err(self.error("`location`"));
                };
                let Some(interfaces) = interfaces else {
                    return Err(self.error("`interfaces`"));
                };
                self.pos += 1;
                return Ok(PortDecl {
                    kind,
                    name,
                    location,
                    location_span,
                    protocol,
                    interfaces,
                });
            }
            let clause = if token.kind == TokenKind::Ident {
                token.lexeme.to_ascii_lowercase()
            } else {
                String::new()
            };
            match clause.as_str() {
                "location" if location.is_none() => {
                    self.pos += 1;
                    self.expect(TokenKind::Colon, "`:`")?;
                    let span = self.span();
                    location = Some((self.expr()?, span));
                }
                "protocol" if protocol.is_none() => {
                    self.pos += 1;
                    self.expect(TokenKind::Colon, "`:`")?;
                    protocol = Some(self.protocol()?);
                }
                "interfaces" if interfaces.is_none() => {
                    self.pos += 1;
                    self.expect(TokenKind::Colon, "`:`")?;
                    let mut names = vec![self.ident("interface name")?];
                    while self.eat(&TokenKind::Comma) {
                        names.push(self.ident("interface name")?);
                    }
                    interfaces = Some(names);
                }
                _ => {
                    let mut expected = Vec::new();
                    if location.is_none() {
                        expected.push("`location`");
                    }
                    if protocol.is_none() {
                        expected.push("`protocol`");
                    }
                    if interfaces.is_none() {
                        expected.push("`interfaces`");
                    }
                    expected.push("`}`");
                    return Err(self.error(expected.join(", ")));
                }
            }
        }
    }

    fn protocol(&mut self) -> PResult<Protocol> {
        let name = self.ident("protocol name")?;
        let mut params = Vec::new();
        if self.eat(&TokenKind::LBrace) {
            while !self.eat(&TokenKind::RBrace) {
                let key = self.ident("protocol parameter or `}`")?;
                self.expect(TokenKind::Assign, "`=`")?;
                let value = self.literal().ok_or_else(|| self.error("literal"))?;
                params.push((key, value));
                if !self.eat(&TokenKind::Comma) {
                    self.eat(&TokenKind::Semi);
                }
            }
        }
        Ok(Protocol { name, params })
    }

    fn literal(&mut self) -> Option<Literal> {
        let lit = match &self.peek()?.kind {
            TokenKind::IntLit(v) => Literal::Int(*v),
            TokenKind::LongLit(v) => Literal::Long(*v),
            TokenKind::DoubleLit(v) => Literal::Double(*v),
            TokenKind::StrLit(s) => Literal::Str(s.clone()),
            TokenKind::True => Literal::Bool(true),
            TokenKind::False => Literal::Bool(false),
            _ => return None,
        };
        self.pos += 1;
        Some(lit)
    }

    // ---- behaviour ----

    fn behavior(&mut self) -> PResult<Behavior> {
        self.expect(TokenKind::LBrace, "`{`")?;
        if self.check(&TokenKind::LBracket) {
            let mut branches = Vec::new();
            while self.eat(&TokenKind::LBracket) {
                branches.push(self.branch()?);
                self.expect(TokenKind::RBracket, "`]`")?;
            }
            self.expect(TokenKind::RBrace, "`[` or `}`")?;
            return Ok(Behavior::InputChoice(branches));
        }
        let mut stmts = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            if self.at_end() {
                return Err(self.error("statement or `}`"));
            }
            stmts.push(self.statement()?);
        }
        Ok(Behavior::Sequence(stmts))
    }

    fn branch(&mut self) -> PResult<Branch> {
        let operation = self.ident("operation name")?;
        self.expect(TokenKind::LParen, "`(`")?;
        let request = self.path()?;
        self.expect(TokenKind::RParen, "`)`")?;
        let response = if self.eat(&TokenKind::LParen) {
            let path = self.path()?;
            self.expect(TokenKind::RParen, "`)`")?;
            Some(path)
        } else {
            None
        };
        let body = self.block()?;
        Ok(Branch {
            operation,
            request,
            response,
            body,
        })
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut stmts = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            if self.at_end() {
                return Err(self.error("statement or `}`"));
            }
            stmts.push(self.statement()?);
        }
        Ok(stmts)
    }

    /// A braced block, or a single statement standing in for one.
    fn body(&mut self) -> PResult<Vec<Stmt>> {
        if self.check(&TokenKind::LBrace) {
            self.block()
        } else {
            Ok(vec![self.statement()?])
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let span = self.span();
        let kind = match self.peek_kind() {
            Some(TokenKind::If) => {
                self.pos += 1;
                let cond = self.paren_expr()?;
                let then_branch = self.body()?;
                let else_branch = if self.eat(&TokenKind::Else) {
                    Some(self.body()?)
                } else {
                    None
                };
                StmtKind::If {
                    cond,
                    then_branch,
                    else_branch,
                }
            }
            Some(TokenKind::While) => {
                self.pos += 1;
                let cond = self.paren_expr()?;
                let body = self.body()?;
                StmtKind::While { cond, body }
            }
            Some(TokenKind::Throw) => {
                self.pos += 1;
                self.expect(TokenKind::LParen, "`(`")?;
                let fault = self.ident("fault name")?;
                let data = if self.eat(&TokenKind::Comma) {
                    Some(self.expr()?)
                } else {
                    None
                };
                self.expect(TokenKind::RParen, "`)`")?;
                StmtKind::Throw { fault, data }
            }
            Some(TokenKind::Ident) => match self.peek_nth_kind(1) {
                Some(TokenKind::At) => self.invocation()?,
                Some(TokenKind::LParen) => {
                    let operation = self.ident("operation name")?;
                    self.pos += 1;
                    let target = self.path()?;
                    self.expect(TokenKind::RParen, "`)`")?;
                    StmtKind::Receive { operation, target }
                }
                _ => {
                    let target = self.path()?;
                    self.expect(TokenKind::Assign, "`=`")?;
                    let value = self.expr()?;
                    StmtKind::Assign { target, value }
                }
            },
            _ => return Err(self.error("statement")),
        };
        self.eat(&TokenKind::Semi);
        Ok(Stmt { kind, span })
    }

    fn invocation(&mut self) -> PResult<StmtKind> {
        let operation = self.ident("operation name")?;
        self.expect(TokenKind::At, "`@`")?;
        let port = self.ident("output port name")?;
        self.expect(TokenKind::LParen, "`(`")?;
        let request = if self.check(&TokenKind::RParen) {
            None
        } else {
            Some(self.expr()?)
        };
        self.expect(TokenKind::RParen, "`)`")?;
        if !self.eat(&TokenKind::LParen) {
            return Ok(StmtKind::Notify {
                operation,
                port,
                message: request,
            });
        }
        let response = if self.check(&TokenKind::RParen) {
            None
        } else {
            Some(self.path()?)
        };
        self.expect(TokenKind::RParen, "`)`")?;
        Ok(StmtKind::SolicitResponse {
            operation,
            port,
            request,
            response,
        })
    }

    fn paren_expr(&mut self) -> PResult<Expr> {
        self.expect(TokenKind::LParen, "`(`")?;
        let e = self.expr()?;
        self.expect(TokenKind::RParen, "`)`")?;
        Ok(e)
    }

    fn path(&mut self) -> PResult<Path> {
        let span = self.span();
        let root = self.ident("variable name")?;
        self.path_from(root.name, span)
    }

    fn path_from(&mut self, root: String, span: Span) -> PResult<Path> {
        let mut steps = vec![PathStep {
            name: root,
            index: self.index()?,
        }];
        while self.eat(&TokenKind::Dot) {
            let name = self.name("path step name")?.name;
            let index = self.index()?;
            steps.push(PathStep { name, index });
        }
        Ok(Path { steps, span })
    }

    fn index(&mut self) -> PResult<Option<Box<Expr>>> {
        if self.eat(&TokenKind::LBracket) {
            let e = self.expr()?;
            self.expect(TokenKind::RBracket, "`]`")?;
            Ok(Some(Box::new(e)))
        } else {
            Ok(None)
        }
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        let op = match self.peek_kind()? {
            TokenKind::OrOr => BinaryOp::Or,
            TokenKind::AndAnd => BinaryOp::And,
            TokenKind::EqEq => BinaryOp::Eq,
            TokenKind::NotEq => BinaryOp::NotEq,
            TokenKind::Lt => BinaryOp::Lt,
            TokenKind::LtEq => BinaryOp::LtEq,
            TokenKind::Gt => BinaryOp::Gt,
            TokenKind::GtEq => BinaryOp::GtEq,
            TokenKind::Plus => BinaryOp::Add,
            TokenKind::Minus => BinaryOp::Sub,
            TokenKind::Star => BinaryOp::Mul,
            TokenKind::Slash => BinaryOp::Div,
            _ => return None,
        };
        Some(op)
    }

    /// Precedence climbing. Comparisons do not chain.
    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
            if prec == 3 && matches!(self.binary_op(), Some(next) if next.precedence() == 3) {
                return Err(self.error("non-comparison operator (comparisons do not chain)"));
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        match self.peek_kind() {
            Some(TokenKind::Bang) => {
                self.pos += 1;
                Ok(Expr::Unary {
                    op: UnaryOp::Not,
                    operand: Box::new(self.unary()?),
                })
            }
            Some(TokenKind::Minus) => {
                self.pos += 1;
                Ok(Expr::Unary {
                    op: UnaryOp::Neg,
                    operand: Box::new(self.unary()?),
                })
            }
            Some(TokenKind::Hash) => {
                self.pos += 1;
                Ok(Expr::Size(self.path()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        if let Some(lit) = self.literal() {
            return Ok(Expr::Literal(lit));
        }
        match self.peek_kind() {
            Some(TokenKind::Ident) => self.path().map(Expr::Path),
            Some(TokenKind::LParen) => self.paren_expr(),
            Some(TokenKind::LBrace) => {
                self.pos += 1;
                let mut entries = Vec::new();
                while !self.eat(&TokenKind::RBrace) {
                    if !self.at_name() {
                        return Err(self.error("tree entry or `}`"));
                    }
                    let span = self.span();
                    let root = self.name("tree entry")?.name;
                    let path = self.path_from(root, span)?;
                    self.expect(TokenKind::Assign, "`=`")?;
                    let value = self.expr()?;
                    entries.push((path, value));
                    if !self.eat(&TokenKind::Comma) {
                        self.eat(&TokenKind::Semi);
                    }
                }
                Ok(Expr::Tree(entries))
            }
            _ => Err(self.error("expression")),
        }
    }
}
