//! Abstract syntax for service-definition programs.
//!
//! Every node that can be the subject of a diagnostic carries a [`Span`].
//! Spans never take part in equality, so two programs compare equal when
//! they have the same structure regardless of where it came from.

use std::fmt;

/// 1-based line/column of the token that starts a node.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A name together with the position it was written at.
#[derive(Debug, Clone, PartialEq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: Span) -> Self {
        Ident {
            name: name.into(),
            span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceProgram {
    /// File stem, used to name generated output.
    pub source_name: String,
    pub declarations: Vec<Declaration>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Declaration {
    Type(TypeDecl),
    Interface(InterfaceDecl),
    Service(ServiceDecl),
}

impl Declaration {
    pub fn name(&self) -> &str {
        match self {
            Declaration::Type(d) => &d.name.name,
            Declaration::Interface(d) => &d.name.name,
            Declaration::Service(d) => &d.name.name,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Declaration::Type(d) => d.name.span,
            Declaration::Interface(d) => d.name.span,
            Declaration::Service(d) => d.name.span,
        }
    }

    pub fn kind(&self) -> DeclKind {
        match self {
            Declaration::Type(_) => DeclKind::Type,
            Declaration::Interface(_) => DeclKind::Interface,
            Declaration::Service(_) => DeclKind::Service,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeclKind {
    Type,
    Interface,
    Service,
}

impl fmt::Display for DeclKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeclKind::Type => "type",
            DeclKind::Interface => "interface",
            DeclKind::Service => "service",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasicType {
    Void,
    Bool,
    Int,
    Long,
    Double,
    String,
    Any,
}

impl BasicType {
    pub fn keyword(self) -> &'static str {
        match self {
            BasicType::Void => "void",
            BasicType::Bool => "bool",
            BasicType::Int => "int",
            BasicType::Long => "long",
            BasicType::Double => "double",
            BasicType::String => "string",
            BasicType::Any => "any",
        }
    }
}

impl fmt::Display for BasicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeDecl {
    pub name: Ident,
    pub root: BasicType,
    pub fields: Vec<FieldDecl>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cardinality {
    One,
    Optional,
    Many,
}

impl Cardinality {
    pub fn admits(self, count: usize) -> bool {
        match self {
            Cardinality::One => count == 1,
            Cardinality::Optional => count <= 1,
            Cardinality::Many => true,
        }
    }

    pub fn marker(self) -> &'static str {
        match self {
            Cardinality::One => "",
            Cardinality::Optional => "?",
            Cardinality::Many => "*",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Cardinality::One => "exactly-one",
            Cardinality::Optional => "optional",
            Cardinality::Many => "zero-or-more",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub name: Ident,
    pub cardinality: Cardinality,
    pub ty: TypeRef,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeRef {
    Basic(BasicType),
    Named(Ident),
    /// Anonymous tree type written in place, e.g. `geo : void { lat : double }`.
    Inline {
        root: BasicType,
        fields: Vec<FieldDecl>,
    },
}

impl TypeRef {
    /// Visits every declared type name referenced by this type expression.
    pub fn for_each_named<'a>(&'a self, f: &mut impl FnMut(&'a Ident)) {
        match self {
            TypeRef::Basic(_) => {}
            TypeRef::Named(id) => f(id),
            TypeRef::Inline { fields, .. } => {
                for field in fields {
                    field.ty.for_each_named(f);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceDecl {
    pub name: Ident,
    pub request_responses: Vec<RequestResponseOp>,
    pub one_ways: Vec<OneWayOp>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RequestResponseOp {
    pub name: Ident,
    pub request: TypeRef,
    pub response: TypeRef,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneWayOp {
    pub name: Ident,
    pub request: TypeRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ExecutionMode {
    Concurrent,
    Sequential,
    #[default]
    Single,
}

impl ExecutionMode {
    pub fn keyword(self) -> &'static str {
        match self {
            ExecutionMode::Concurrent => "concurrent",
            ExecutionMode::Sequential => "sequential",
            ExecutionMode::Single => "single",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigParam {
    pub name: Ident,
    pub ty: Option<Ident>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceDecl {
    pub name: Ident,
    pub config: Option<ConfigParam>,
    pub execution: Option<ExecutionMode>,
    pub input_ports: Vec<PortDecl>,
    pub output_ports: Vec<PortDecl>,
    /// Written as `...` in the source: the body is deliberately elided.
    pub elided: bool,
    pub main: Option<Behavior>,
}

impl ServiceDecl {
    pub fn execution_mode(&self) -> ExecutionMode {
        self.execution.unwrap_or_default()
    }

    pub fn ports(&self) -> impl Iterator<Item = &PortDecl> {
        self.input_ports.iter().chain(self.output_ports.iter())
    }

    pub fn output_port(&self, name: &str) -> Option<&PortDecl> {
        self.output_ports.iter().find(|p| p.name.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PortKind {
    Input,
    Output,
}

impl PortKind {
    pub fn keyword(self) -> &'static str {
        match self {
            PortKind::Input => "inputPort",
            PortKind::Output => "outputPort",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortDecl {
    pub kind: PortKind,
    pub name: Ident,
    pub location: Expr,
    pub location_span: Span,
    pub protocol: Option<Protocol>,
    pub interfaces: Vec<Ident>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Protocol {
    pub name: Ident,
    pub params: Vec<(Ident, Literal)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Behavior {
    InputChoice(Vec<Branch>),
    Sequence(Vec<Stmt>),
}

/// One `[ op(req)(res) { ... } ]` or `[ op(req) { ... } ]` alternative.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub operation: Ident,
    pub request: Path,
    /// Present for request-response branches.
    pub response: Option<Path>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    /// `path = expr`. Also covers `Port.location = expr`, which the
    /// semantic layer recognises as a port rebinding.
    Assign {
        target: Path,
        value: Expr,
    },
    /// `op@Port(expr)(path)`; an empty `()` discards the response.
    SolicitResponse {
        operation: Ident,
        port: Ident,
        request: Option<Expr>,
        response: Option<Path>,
    },
    /// `op@Port(expr)`
    Notify {
        operation: Ident,
        port: Ident,
        message: Option<Expr>,
    },
    /// `op(path)`: wait for an inbound one-way message.
    Receive {
        operation: Ident,
        target: Path,
    },
    If {
        cond: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Option<Vec<Stmt>>,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
    },
    Throw {
        fault: Ident,
        data: Option<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub steps: Vec<PathStep>,
    pub span: Span,
}

impl Path {
    pub fn root(&self) -> &str {
        &self.steps[0].name
    }

    pub fn simple(name: &str) -> Path {
        Path {
            steps: vec![PathStep {
                name: name.to_string(),
                index: None,
            }],
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathStep {
    pub name: String,
    pub index: Option<Box<Expr>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Bool(bool),
    Int(i32),
    Long(i64),
    Double(f64),
    Str(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    NotEq,
    Lt,
    LtEq,
    Gt,
    GtEq,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Or => "||",
            BinaryOp::And => "&&",
            BinaryOp::Eq => "==",
            BinaryOp::NotEq => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::LtEq => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::GtEq => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq
            | BinaryOp::NotEq
            | BinaryOp::Lt
            | BinaryOp::LtEq
            | BinaryOp::Gt
            | BinaryOp::GtEq => 3,
            BinaryOp::Add | BinaryOp::Sub => 4,
            BinaryOp::Mul | BinaryOp::Div => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal(Literal),
    Path(Path),
    /// `#path`: number of occurrences of the last step.
    Size(Path),
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    /// `{ a = 1, b.c = "x" }`
    Tree(Vec<(Path, Expr)>),
}
