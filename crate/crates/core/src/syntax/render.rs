//! Canonical source rendering.
//!
//! Output uses tab indentation, one declaration per block separated by a
//! blank line, ` : ` around type annotations, and always-braced statement
//! bodies. Comments are not preserved.

use super::ast::*;
use std::fmt::Write;

pub fn render(program: &SourceProgram) -> String {
    let mut r = Renderer::default();
    for (i, decl) in program.declarations.iter().enumerate() {
        if i > 0 {
            r.out.push('\n');
        }
        match decl {
            Declaration::Type(t) => r.type_decl(t),
            Declaration::Interface(i) => r.interface_decl(i),
            Declaration::Service(s) => r.service_decl(s),
        }
    }
    r.out
}

/// Renders a single expression in canonical form.
pub fn render_expr(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr, 0);
    out
}

pub fn render_path(path: &Path) -> String {
    let mut out = String::new();
    write_path(&mut out, path);
    out
}

#[derive(Default)]
struct Renderer {
    out: String,
    depth: usize,
}

impl Renderer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.out.push('\t');
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn type_decl(&mut self, t: &TypeDecl) {
        let head = format!("type {} : {}", t.name.name, t.root);
        if t.fields.is_empty() {
            self.line(&head);
        } else {
            self.line(&format!("{head} {{"));
            self.fields(&t.fields);
            self.line("}");
        }
    }

    fn fields(&mut self, fields: &[FieldDecl]) {
        self.depth += 1;
        for field in fields {
            let head = format!("{}{} :", field.name.name, field.cardinality.marker());
            match &field.ty {
                TypeRef::Inline { root, fields } if !fields.is_empty() => {
                    self.line(&format!("{head} {root} {{"));
                    self.fields(fields);
                    self.line("}");
                }
                ty => self.line(&format!("{head} {}", type_ref(ty))),
            }
        }
        self.depth -= 1;
    }

    fn interface_decl(&mut self, i: &InterfaceDecl) {
        if i.request_responses.is_empty() && i.one_ways.is_empty() {
            self.line(&format!("interface {} {{ }}", i.name.name));
            return;
        }
        self.line(&format!("interface {} {{", i.name.name));
        if !i.request_responses.is_empty() {
            self.line("RequestResponse:");
            self.depth += 1;
            let n = i.request_responses.len();
            for (k, op) in i.request_responses.iter().enumerate() {
                let sep = if k + 1 < n { "," } else { "" };
                self.line(&format!(
                    "{}( {} )( {} ){sep}",
                    op.name.name,
                    type_ref(&op.request),
                    type_ref(&op.response)
                ));
            }
            self.depth -= 1;
        }
        if !i.one_ways.is_empty() {
            self.line("OneWay:");
            self.depth += 1;
            let n = i.one_ways.len();
            for (k, op) in i.one_ways.iter().enumerate() {
                let sep = if k + 1 < n { "," } else { "" };
                self.line(&format!(
                    "{}( {} ){sep}",
                    op.name.name,
                    type_ref(&op.request)
                ));
            }
            self.depth -= 1;
        }
        self.line("}");
    }

    fn service_decl(&mut self, s: &ServiceDecl) {
        let mut head = format!("service {}", s.name.name);
        if let Some(config) = &s.config {
            match &config.ty {
                Some(ty) => write!(head, "( {} : {} )", config.name.name, ty.name).unwrap(),
                None => write!(head, "( {} )", config.name.name).unwrap(),
            }
        }
        self.line(&format!("{head} {{"));
        self.depth += 1;
        if let Some(mode) = s.execution {
            self.line(&format!("execution: {}", mode.keyword()));
        }
        for port in s.ports() {
            self.port(port);
        }
        if s.elided {
            self.line("...");
        }
        if let Some(main) = &s.main {
            self.behavior(main);
        }
        self.depth -= 1;
        self.line("}");
    }

    fn port(&mut self, p: &PortDecl) {
        self.line(&format!("{} {} {{", p.kind.keyword(), p.name.name));
        self.depth += 1;
        self.line(&format!("location: {}", render_expr(&p.location)));
        if let Some(proto) = &p.protocol {
            if proto.params.is_empty() {
                self.line(&format!("protocol: {}", proto.name.name));
            } else {
                let params: Vec<String> = proto
                    .params
                    .iter()
                    .map(|(k, v)| format!("{} = {}", k.name, literal(v)))
                    .collect();
                self.line(&format!(
                    "protocol: {} {{ {} }}",
                    proto.name.name,
                    params.join(", ")
                ));
            }
        }
        let names: Vec<&str> = p.interfaces.iter().map(|i| i.name.as_str()).collect();
        self.line(&format!("interfaces: {}", names.join(", ")));
        self.depth -= 1;
        self.line("}");
    }

    fn behavior(&mut self, b: &Behavior) {
        match b {
            Behavior::Sequence(stmts) if stmts.is_empty() => self.line("main { }"),
            Behavior::Sequence(stmts) => {
                self.line("main {");
                self.stmts(stmts);
                self.line("}");
            }
            Behavior::InputChoice(branches) => {
                self.line("main {");
                self.depth += 1;
                for branch in branches {
                    let mut head = format!(
                        "[ {}( {} )",
                        branch.operation.name,
                        render_path(&branch.request)
                    );
                    if let Some(res) = &branch.response {
                        write!(head, "( {} )", render_path(res)).unwrap();
                    }
                    if branch.body.is_empty() {
                        self.line(&format!("{head} {{ }} ]"));
                    } else {
                        self.line(&format!("{head} {{"));
                        self.stmts(&branch.body);
                        self.line("} ]");
                    }
                }
                self.depth -= 1;
                self.line("}");
            }
        }
    }

    fn stmts(&mut self, stmts: &[Stmt]) {
        self.depth += 1;
        for s in stmts {
            self.stmt(s);
        }
        self.depth -= 1;
    }

    fn block_open(&mut self, head: &str, body: &[Stmt]) {
        if body.is_empty() {
            self.line(&format!("{head} {{ }}"));
        } else {
            self.line(&format!("{head} {{"));
            self.stmts(body);
            self.line("}");
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Assign { target, value } => {
                self.line(&format!("{} = {}", render_path(target), render_expr(value)))
            }
            StmtKind::SolicitResponse {
                operation,
                port,
                request,
                response,
            } => {
                let req = request.as_ref().map(render_expr).unwrap_or_default();
                let res = response.as_ref().map(render_path).unwrap_or_default();
                self.line(&format!(
                    "{}@{}({})({})",
                    operation.name,
                    port.name,
                    pad(&req),
                    pad(&res)
                ));
            }
            StmtKind::Notify {
                operation,
                port,
                message,
            } => {
                let msg = message.as_ref().map(render_expr).unwrap_or_default();
                self.line(&format!("{}@{}({})", operation.name, port.name, pad(&msg)));
            }
            StmtKind::Receive { operation, target } => {
                self.line(&format!("{}( {} )", operation.name, render_path(target)))
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let head = format!("if ( {} )", render_expr(cond));
                match else_branch {
                    None => self.block_open(&head, then_branch),
                    Some(else_branch) => {
                        self.block_open(&head, then_branch);
                        self.block_open("else", else_branch);
                    }
                }
            }
            StmtKind::While { cond, body } => {
                self.block_open(&format!("while ( {} )", render_expr(cond)), body)
            }
            StmtKind::Throw { fault, data } => match data {
                Some(d) => self.line(&format!("throw( {}, {} )", fault.name, render_expr(d))),
                None => self.line(&format!("throw( {} )", fault.name)),
            },
        }
    }
}

fn pad(s: &str) -> String {
    if s.is_empty() {
        String::new()
    } else {
        format!(" {s} ")
    }
}

fn type_ref(ty: &TypeRef) -> String {
    match ty {
        TypeRef::Basic(b) => b.keyword().to_string(),
        TypeRef::Named(id) => id.name.clone(),
        TypeRef::Inline { root, fields } => {
            let mut out = format!("{root} {{");
            for f in fields {
                write!(
                    out,
                    " {}{} : {}",
                    f.name.name,
                    f.cardinality.marker(),
                    type_ref(&f.ty)
                )
                .unwrap();
            }
            out.push_str(" }");
            out
        }
    }
}

pub(crate) fn literal(lit: &Literal) -> String {
    match lit {
        Literal::Bool(b) => b.to_string(),
        Literal::Int(v) => v.to_string(),
        Literal::Long(v) => format!("{v}L"),
        Literal::Double(v) => format!("{v:?}"),
        Literal::Str(s) => quote(s),
    }
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn write_path(out: &mut String, path: &Path) {
    for (i, step) in path.steps.iter().enumerate() {
        if i > 0 {
            out.push('.');
        }
        out.push_str(&step.name);
        if let Some(index) = &step.index {
            out.push('[');
            write_expr(out, index, 0);
            out.push(']');
        }
    }
}

const UNARY_PREC: u8 = 6;

fn write_expr(out: &mut String, expr: &Expr, min_prec: u8) {
    match expr {
        Expr::Literal(lit) => out.push_str(&literal(lit)),
        Expr::Path(p) => write_path(out, p),
        Expr::Size(p) => {
            out.push('#');
            write_path(out, p);
        }
        Expr::Unary { op, operand } => {
            out.push(match op {
                UnaryOp::Not => '!',
                UnaryOp::Neg => '-',
            });
            write_expr(out, operand, UNARY_PREC);
        }
        Expr::Binary { op, lhs, rhs } => {
            let prec = op.precedence();
            let parens = prec < min_prec;
            if parens {
                out.push('(');
            }
            // left-associative, and comparisons do not chain
            let lhs_min = if prec == 3 { prec + 1 } else { prec };
            write_expr(out, lhs, lhs_min);
            write!(out, " {} ", op.symbol()).unwrap();
            write_expr(out, rhs, prec + 1);
            if parens {
                out.push(')');
            }
        }
        Expr::Tree(entries) => {
            if entries.is_empty() {
                out.push_str("{ }");
                return;
            }
            out.push_str("{ ");
            for (i, (path, value)) in entries.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_path(out, path);
                out.push_str(" = ");
                write_expr(out, value, 0);
            }
            out.push_str(" }");
        }
    }
}
