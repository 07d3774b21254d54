//! Name resolution and validation of parsed programs.

mod check;

pub use check::{check_value, coerce_value, Violation};

use crate::syntax::*;
use indexmap::IndexMap;
use std::collections::HashSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {kind}")]
pub struct SemanticError {
    pub kind: SemanticErrorKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticErrorKind {
    #[error("undefined type `{0}`")]
    UndefinedType(String),
    #[error("undefined interface `{0}`")]
    UndefinedInterface(String),
    #[error("{}", unknown_operation(.operation, .port.as_deref()))]
    UnknownOperation {
        operation: String,
        port: Option<String>,
    },
    #[error("operation `{operation}` is {actual}, but is used as {used}")]
    OperationKindMismatch {
        operation: String,
        actual: OperationKind,
        used: OperationKind,
    },
    #[error("duplicate {what} `{name}`")]
    DuplicateDeclaration { what: String, name: String },
    #[error("unknown output port `{0}`")]
    UnknownPort(String),
    #[error("location must be a string literal or a path into `{0}`")]
    InvalidLocation(String),
}

fn unknown_operation(op: &str, port: Option<&str>) -> String {
    match port {
        Some(port) => format!("port `{port}` offers no operation `{op}`"),
        None => format!("no input port offers operation `{op}`"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub message: String,
    pub span: Span,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperationKind {
    RequestResponse,
    OneWay,
}

impl fmt::Display for OperationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperationKind::RequestResponse => "request-response",
            OperationKind::OneWay => "one-way",
        })
    }
}

/// An operation as offered through a port, with its message types.
#[derive(Debug, Clone, PartialEq)]
pub struct Operation {
    pub name: String,
    pub interface: String,
    pub kind: OperationKind,
    pub request: TypeRef,
    pub response: Option<TypeRef>,
}

#[derive(Debug, Clone)]
pub struct PortInfo {
    pub name: String,
    pub kind: PortKind,
    pub interfaces: Vec<String>,
    pub operations: IndexMap<String, Operation>,
}

#[derive(Debug, Clone)]
pub struct ServiceInfo {
    pub input_ports: Vec<PortInfo>,
    pub output_ports: Vec<PortInfo>,
}

impl ServiceInfo {
    /// First input port offering `op`, with the operation itself.
    pub fn inbound(&self, op: &str) -> Option<(usize, &Operation)> {
        self.input_ports
            .iter()
            .enumerate()
            .find_map(|(i, p)| p.operations.get(op).map(|o| (i, o)))
    }

    pub fn output_port(&self, name: &str) -> Option<&PortInfo> {
        self.output_ports.iter().find(|p| p.name == name)
    }
}

/// A program whose every reference resolved.
#[derive(Debug, Clone)]
pub struct CheckedProgram {
    program: SourceProgram,
    types: IndexMap<String, usize>,
    interfaces: IndexMap<String, usize>,
    services: IndexMap<String, usize>,
    service_info: IndexMap<String, ServiceInfo>,
    warnings: Vec<Warning>,
}

impl CheckedProgram {
    pub fn program(&self) -> &SourceProgram {
        &self.program
    }

    pub fn into_program(self) -> SourceProgram {
        self.program
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn type_decl(&self, name: &str) -> Option<&TypeDecl> {
        match &self.program.declarations[*self.types.get(name)?] {
            Declaration::Type(t) => Some(t),
            _ => None,
        }
    }

    pub fn interface(&self, name: &str) -> Option<&InterfaceDecl> {
        match &self.program.declarations[*self.interfaces.get(name)?] {
            Declaration::Interface(i) => Some(i),
            _ => None,
        }
    }

    pub fn service(&self, name: &str) -> Option<&ServiceDecl> {
        match &self.program.declarations[*self.services.get(name)?] {
            Declaration::Service(s) => Some(s),
            _ => None,
        }
    }

    pub fn service_info(&self, name: &str) -> Option<&ServiceInfo> {
        self.service_info.get(name)
    }

    pub fn type_names(&self) -> impl Iterator<Item = &str> {
        self.types.keys().map(String::as_str)
    }

    pub fn interface_names(&self) -> impl Iterator<Item = &str> {
        self.interfaces.keys().map(String::as_str)
    }

    /// Service names in source order.
    pub fn service_names(&self) -> impl Iterator<Item = &str> {
        self.services.keys().map(String::as_str)
    }

    pub fn services(&self) -> impl Iterator<Item = &ServiceDecl> {
        self.services.keys().filter_map(|n| self.service(n))
    }

    pub fn check_value(&self, tree: &crate::ValueTree, ty: &TypeRef) -> Result<(), Vec<Violation>> {
        check_value(self, tree, ty)
    }
}

/// Resolves every name in `program`. Either the whole program checks, or the
/// complete list of errors is returned.
pub fn resolve(program: SourceProgram) -> Result<CheckedProgram, Vec<SemanticError>> {
    let mut r = Resolver::default();
    r.tables(&program);
    for decl in &program.declarations {
        match decl {
            Declaration::Type(t) => r.type_decl(t),
            Declaration::Interface(i) => r.interface_decl(i),
            Declaration::Service(_) => {}
        }
    }
    let mut service_info = IndexMap::new();
    for decl in &program.declarations {
        if let Declaration::Service(s) = decl {
            let info = r.service_decl(&program, s);
            service_info.entry(s.name.name.clone()).or_insert(info);
        }
    }
    if !r.errors.is_empty() {
        return Err(r.errors);
    }
    Ok(CheckedProgram {
        types: r.types,
        interfaces: r.interfaces,
        services: r.services,
        service_info,
        warnings: r.warnings,
        program,
    })
}

#[derive(Default)]
struct Resolver {
    types: IndexMap<String, usize>,
    interfaces: IndexMap<String, usize>,
    services: IndexMap<String, usize>,
    errors: Vec<SemanticError>,
    warnings: Vec<Warning>,
}

impl Resolver {
    fn error(&mut self, kind: SemanticErrorKind, span: Span) {
        self.errors.push(SemanticError { kind, span });
    }

    fn duplicate(&mut self, what: &str, name: &Ident) {
        self.error(
            SemanticErrorKind::DuplicateDeclaration {
                what: what.to_string(),
                name: name.name.clone(),
            },
            name.span,
        );
    }

    fn tables(&mut self, program: &SourceProgram) {
        for (i, decl) in program.declarations.iter().enumerate() {
            let (table, id) = match decl {
                Declaration::Type(t) => (&mut self.types, &t.name),
                Declaration::Interface(d) => (&mut self.interfaces, &d.name),
                Declaration::Service(s) => (&mut self.services, &s.name),
            };
            if table.contains_key(&id.name) {
                let what = decl.kind().to_string();
                self.duplicate(&what, id);
            } else {
                table.insert(id.name.clone(), i);
            }
        }
    }

    fn type_decl(&mut self, t: &TypeDecl) {
        self.fields(&t.fields);
    }

    fn fields(&mut self, fields: &[FieldDecl]) {
        let mut seen = HashSet::new();
        for field in fields {
            if !seen.insert(field.name.name.as_str()) {
                self.duplicate("field", &field.name);
            }
            self.type_ref(&field.ty);
        }
    }

    fn type_ref(&mut self, ty: &TypeRef) {
        match ty {
            TypeRef::Basic(_) => {}
            TypeRef::Named(id) => {
                if !self.types.contains_key(&id.name) {
                    self.error(SemanticErrorKind::UndefinedType(id.name.clone()), id.span);
                }
            }
            TypeRef::Inline { fields, .. } => self.fields(fields),
        }
    }

    fn interface_decl(&mut self, i: &InterfaceDecl) {
        let mut seen = HashSet::new();
        for op in &i.request_responses {
            if !seen.insert(op.name.name.as_str()) {
                self.duplicate("operation", &op.name);
            }
            self.type_ref(&op.request);
            self.type_ref(&op.response);
        }
        for op in &i.one_ways {
            if !seen.insert(op.name.name.as_str()) {
                self.duplicate("operation", &op.name);
            }
            self.type_ref(&op.request);
        }
    }

    fn port_info(&mut self, program: &SourceProgram, port: &PortDecl) -> PortInfo {
        let mut operations = IndexMap::new();
        for iface in &port.interfaces {
            let Some(&idx) = self.interfaces.get(&iface.name) else {
                self.error(
                    SemanticErrorKind::UndefinedInterface(iface.name.clone()),
                    iface.span,
                );
                continue;
            };
            let Declaration::Interface(decl) = &program.declarations[idx] else {
                continue;
            };
            for op in &decl.request_responses {
                operations
                    .entry(op.name.name.clone())
                    .or_insert_with(|| Operation {
                        name: op.name.name.clone(),
                        interface: decl.name.name.clone(),
                        kind: OperationKind::RequestResponse,
                        request: op.request.clone(),
                        response: Some(op.response.clone()),
                    });
            }
            for op in &decl.one_ways {
                operations
                    .entry(op.name.name.clone())
                    .or_insert_with(|| Operation {
                        name: op.name.name.clone(),
                        interface: decl.name.name.clone(),
                        kind: OperationKind::OneWay,
                        request: op.request.clone(),
                        response: None,
                    });
            }
        }
        PortInfo {
            name: port.name.name.clone(),
            kind: port.kind,
            interfaces: port.interfaces.iter().map(|i| i.name.clone()).collect(),
            operations,
        }
    }

    fn service_decl(&mut self, program: &SourceProgram, s: &ServiceDecl) -> ServiceInfo {
        match &s.config {
            None => {}
            Some(ConfigParam { name, ty: None }) => self.warnings.push(Warning {
                message: format!(
                    "configuration parameter `{}` of service `{}` is untyped; treating it as `any`",
                    name.name, s.name.name
                ),
                span: name.span,
            }),
            Some(ConfigParam { ty: Some(ty), .. }) if !self.types.contains_key(&ty.name) => {
                self.warnings.push(Warning {
                    message: format!(
                        "configuration type `{}` of service `{}` is not declared; treating it as `any`",
                        ty.name, s.name.name
                    ),
                    span: ty.span,
                })
            }
            Some(_) => {}
        }

        let config_name = s.config.as_ref().map(|c| c.name.name.as_str());
        let mut port_names = HashSet::new();
        for port in s.ports() {
            if !port_names.insert(port.name.name.as_str()) {
                self.duplicate("port", &port.name);
            }
            let valid_location = match &port.location {
                Expr::Literal(Literal::Str(_)) => true,
                Expr::Path(p) => Some(p.root()) == config_name && p.steps.len() > 1,
                _ => false,
            };
            if !valid_location {
                self.error(
                    SemanticErrorKind::InvalidLocation(config_name.unwrap_or("config").to_string()),
                    port.location_span,
                );
            }
        }

        let info = ServiceInfo {
            input_ports: s
                .input_ports
                .iter()
                .map(|p| self.port_info(program, p))
                .collect(),
            output_ports: s
                .output_ports
                .iter()
                .map(|p| self.port_info(program, p))
                .collect(),
        };

        match &s.main {
            Some(Behavior::InputChoice(branches)) => {
                let mut seen = HashSet::new();
                for branch in branches {
                    if !seen.insert(branch.operation.name.as_str()) {
                        self.duplicate("input branch", &branch.operation);
                    }
                    let used = if branch.response.is_some() {
                        OperationKind::RequestResponse
                    } else {
                        OperationKind::OneWay
                    };
                    self.inbound(&info, &branch.operation, used);
                    self.stmts(&info, &branch.body);
                }
            }
            Some(Behavior::Sequence(stmts)) => self.stmts(&info, stmts),
            None => {}
        }
        info
    }

    fn inbound(&mut self, info: &ServiceInfo, op: &Ident, used: OperationKind) {
        match info.inbound(&op.name) {
            None => self.error(
                SemanticErrorKind::UnknownOperation {
                    operation: op.name.clone(),
                    port: None,
                },
                op.span,
            ),
            Some((_, o)) if o.kind != used => self.error(
                SemanticErrorKind::OperationKindMismatch {
                    operation: op.name.clone(),
                    actual: o.kind,
                    used,
                },
                op.span,
            ),
            Some(_) => {}
        }
    }

    fn outbound(&mut self, info: &ServiceInfo, op: &Ident, port: &Ident, used: OperationKind) {
        let Some(p) = info.output_port(&port.name) else {
            self.error(SemanticErrorKind::UnknownPort(port.name.clone()), port.span);
            return;
        };
        match p.operations.get(&op.name) {
            None => self.error(
                SemanticErrorKind::UnknownOperation {
                    operation: op.name.clone(),
                    port: Some(port.name.clone()),
                },
                op.span,
            ),
            Some(o) if o.kind != used => self.error(
                SemanticErrorKind::OperationKindMismatch {
                    operation: op.name.clone(),
                    actual: o.kind,
                    used,
                },
                op.span,
            ),
            Some(_) => {}
        }
    }

    fn stmts(&mut self, info: &ServiceInfo, stmts: &[Stmt]) {
        for stmt in stmts {
            match &stmt.kind {
                StmtKind::Assign { .. } | StmtKind::Throw { .. } => {}
                StmtKind::SolicitResponse {
                    operation, port, ..
                } => self.outbound(info, operation, port, OperationKind::RequestResponse),
                StmtKind::Notify {
                    operation, port, ..
                } => self.outbound(info, operation, port, OperationKind::OneWay),
                StmtKind::Receive { operation, .. } => {
                    self.inbound(info, operation, OperationKind::OneWay)
                }
                StmtKind::If {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    self.stmts(info, then_branch);
                    if let Some(e) = else_branch {
                        self.stmts(info, e);
                    }
                }
                StmtKind::While { body, .. } => self.stmts(info, body),
            }
        }
    }
}

/// True when `target` is `Port.location` for an output port of `service`.
pub fn is_port_rebinding(service: &ServiceDecl, target: &Path) -> bool {
    target.steps.len() == 2
        && target.steps.iter().all(|s| s.index.is_none())
        && target.steps[1].name == "location"
        && service.output_port(&target.steps[0].name).is_some()
}
