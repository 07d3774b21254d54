//! Statement and expression evaluation for one activation.

use super::{faults, Fault};
use crate::syntax::{render_path, BinaryOp, Expr, Literal, Path, Stmt, StmtKind, UnaryOp};
use crate::value::{Value, ValueTree};
use std::cmp::Ordering;
use std::sync::Mutex;

/// Path root naming the state an instance shares across activations.
pub(crate) const GLOBAL: &str = "global";

/// The effects an activation may have outside its own scope.
pub(crate) trait Env {
    fn cancelled(&self) -> bool;
    fn global(&self) -> &Mutex<ValueTree>;
    fn is_rebinding(&self, target: &Path) -> bool;
    fn rebind(&self, port: &str, location: &str) -> Result<(), Fault>;
    fn solicit(&self, port: &str, operation: &str, request: ValueTree) -> Result<ValueTree, Fault>;
    fn notify(&self, port: &str, operation: &str, message: ValueTree) -> Result<(), Fault>;
    fn receive(&self, operation: &str) -> Result<ValueTree, Fault>;
}

pub(crate) struct Activation<'e, E: Env + ?Sized> {
    env: &'e E,
    pub scope: ValueTree,
}

fn type_mismatch(message: impl Into<String>) -> Fault {
    Fault::message(faults::TYPE_MISMATCH, message)
}

/// A path with its indices evaluated.
struct Resolved {
    global: bool,
    steps: Vec<(String, usize)>,
}

fn read(root: &ValueTree, steps: &[(String, usize)]) -> Option<ValueTree> {
    let mut node = root;
    for (name, i) in steps {
        node = node.child_at(name, *i)?;
    }
    Some(node.clone())
}

fn write(root: &mut ValueTree, steps: &[(String, usize)], value: ValueTree) {
    let mut node = root;
    for (name, i) in steps {
        node = node.child_mut_extend(name, *i);
    }
    *node = value;
}

fn size(root: &ValueTree, steps: &[(String, usize)]) -> usize {
    let Some(((last, _), parents)) = steps.split_last() else {
        return 0;
    };
    let mut node = root;
    for (name, i) in parents {
        match node.child_at(name, *i) {
            Some(n) => node = n,
            None => return 0,
        }
    }
    node.child(last).len()
}

impl<'e, E: Env + ?Sized> Activation<'e, E> {
    pub fn new(env: &'e E, scope: ValueTree) -> Self {
        Activation { env, scope }
    }

    /// Stores `value` at `path` in this activation's scope.
    pub fn bind(&mut self, path: &Path, value: ValueTree) -> Result<(), Fault> {
        self.assign(path, value)
    }

    /// A copy of the value at `path`, empty when absent.
    pub fn value_at(&mut self, path: &Path) -> Result<ValueTree, Fault> {
        self.lookup(path)
    }

    pub fn run(&mut self, stmts: &[Stmt]) -> Result<(), Fault> {
        for stmt in stmts {
            self.stmt(stmt)?;
        }
        Ok(())
    }

    fn stmt(&mut self, stmt: &Stmt) -> Result<(), Fault> {
        if self.env.cancelled() {
            return Err(Fault::new(faults::ABORTED));
        }
        match &stmt.kind {
            StmtKind::Assign { target, value } => {
                let value = self.eval(value)?;
                if self.env.is_rebinding(target) {
                    let Some(Value::Str(location)) = value.root() else {
                        return Err(Fault::message(
                            faults::INVALID_LOCATION,
                            format!("`{}` must be assigned a string", render_path(target)),
                        ));
                    };
                    return self.env.rebind(target.root(), location);
                }
                self.assign(target, value)
            }
            StmtKind::SolicitResponse {
                operation,
                port,
                request,
                response,
            } => {
                let request = self.eval_opt(request.as_ref())?;
                let answer = self.env.solicit(&port.name, &operation.name, request)?;
                match response {
                    Some(path) => self.assign(path, answer),
                    None => Ok(()),
                }
            }
            StmtKind::Notify {
                operation,
                port,
                message,
            } => {
                let message = self.eval_opt(message.as_ref())?;
                self.env.notify(&port.name, &operation.name, message)
            }
            StmtKind::Receive { operation, target } => {
                let message = self.env.receive(&operation.name)?;
                self.assign(target, message)
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                if self.condition(cond)? {
                    self.run(then_branch)
                } else if let Some(else_branch) = else_branch {
                    self.run(else_branch)
                } else {
                    Ok(())
                }
            }
            StmtKind::While { cond, body } => {
                while self.condition(cond)? {
                    self.run(body)?;
                    if self.env.cancelled() {
                        return Err(Fault::new(faults::ABORTED));
                    }
                }
                Ok(())
            }
            StmtKind::Throw { fault, data } => Err(match data {
                Some(expr) => Fault::with_data(fault.name.clone(), self.eval(expr)?),
                None => Fault::new(fault.name.clone()),
            }),
        }
    }

    fn condition(&mut self, cond: &Expr) -> Result<bool, Fault> {
        match self.eval(cond)?.root() {
            Some(Value::Bool(b)) => Ok(*b),
            other => Err(type_mismatch(format!(
                "condition must be bool, found {}",
                other.map(Value::kind).unwrap_or("no value")
            ))),
        }
    }

    fn resolve(&mut self, path: &Path) -> Result<Resolved, Fault> {
        let global = path.root() == GLOBAL;
        let skip = usize::from(global);
        let mut steps = Vec::with_capacity(path.steps.len());
        for step in &path.steps[skip..] {
            let index = match &step.index {
                None => 0,
                Some(expr) => match self.eval(expr)?.root() {
                    Some(Value::Int(i)) if *i >= 0 => *i as usize,
                    Some(Value::Long(i)) if *i >= 0 => {
                        usize::try_from(*i).map_err(|_| type_mismatch("index too large"))?
                    }
                    other => {
                        return Err(type_mismatch(format!(
                            "index of `{}` must be a non-negative integer, found {}",
                            step.name,
                            other
                                .map(ToString::to_string)
                                .unwrap_or_else(|| "no value".into())
                        )))
                    }
                },
            };
            steps.push((step.name.clone(), index));
        }
        Ok(Resolved { global, steps })
    }

    fn assign(&mut self, target: &Path, value: ValueTree) -> Result<(), Fault> {
        let r = self.resolve(target)?;
        if r.global {
            write(&mut self.env.global().lock().unwrap(), &r.steps, value);
        } else {
            write(&mut self.scope, &r.steps, value);
        }
        Ok(())
    }

    fn lookup(&mut self, path: &Path) -> Result<ValueTree, Fault> {
        let r = self.resolve(path)?;
        let found = if r.global {
            read(&self.env.global().lock().unwrap(), &r.steps)
        } else {
            read(&self.scope, &r.steps)
        };
        Ok(found.unwrap_or_default())
    }

    fn eval_opt(&mut self, expr: Option<&Expr>) -> Result<ValueTree, Fault> {
        expr.map_or_else(|| Ok(ValueTree::new()), |e| self.eval(e))
    }

    pub fn eval(&mut self, expr: &Expr) -> Result<ValueTree, Fault> {
        match expr {
            Expr::Literal(lit) => Ok(ValueTree::leaf(literal(lit))),
            Expr::Path(path) => self.lookup(path),
            Expr::Size(path) => {
                let r = self.resolve(path)?;
                let n = if r.global {
                    size(&self.env.global().lock().unwrap(), &r.steps)
                } else {
                    size(&self.scope, &r.steps)
                };
                Ok(ValueTree::leaf(i32::try_from(n).unwrap_or(i32::MAX)))
            }
            Expr::Unary { op, operand } => {
                let v = self.eval(operand)?;
                unary(*op, v.root()).map(ValueTree::leaf)
            }
            Expr::Binary { op, lhs, rhs } => match op {
                BinaryOp::And | BinaryOp::Or => {
                    let l = self.bool_operand(lhs, *op)?;
                    if l == (*op == BinaryOp::Or) {
                        return Ok(ValueTree::leaf(l));
                    }
                    self.bool_operand(rhs, *op).map(ValueTree::leaf)
                }
                _ => {
                    let l = self.eval(lhs)?;
                    let r = self.eval(rhs)?;
                    binary(*op, l.root(), r.root()).map(ValueTree::leaf)
                }
            },
            Expr::Tree(entries) => {
                let mut tree = ValueTree::new();
                for (path, value) in entries {
                    let value = self.eval(value)?;
                    let r = self.resolve(path)?;
                    // entry paths are relative to the literal, `global` included
                    let mut steps = r.steps;
                    if r.global {
                        steps.insert(0, (GLOBAL.to_string(), 0));
                    }
                    write(&mut tree, &steps, value);
                }
                Ok(tree)
            }
        }
    }

    fn bool_operand(&mut self, expr: &Expr, op: BinaryOp) -> Result<bool, Fault> {
        match self.eval(expr)?.root() {
            Some(Value::Bool(b)) => Ok(*b),
            other => Err(type_mismatch(format!(
                "operands of `{}` must be bool, found {}",
                op.symbol(),
                other.map(Value::kind).unwrap_or("no value")
            ))),
        }
    }
}

pub(crate) fn literal(lit: &Literal) -> Value {
    match lit {
        Literal::Bool(b) => Value::Bool(*b),
        Literal::Int(i) => Value::Int(*i),
        Literal::Long(i) => Value::Long(*i),
        Literal::Double(d) => Value::Double(*d),
        Literal::Str(s) => Value::Str(s.clone()),
    }
}

fn unary(op: UnaryOp, v: Option<&Value>) -> Result<Value, Fault> {
    match (op, v) {
        (UnaryOp::Not, Some(Value::Bool(b))) => Ok(Value::Bool(!b)),
        (UnaryOp::Neg, Some(Value::Int(i))) => Ok(Value::Int(i.wrapping_neg())),
        (UnaryOp::Neg, Some(Value::Long(i))) => Ok(Value::Long(i.wrapping_neg())),
        (UnaryOp::Neg, Some(Value::Double(d))) => Ok(Value::Double(-d)),
        (op, v) => Err(type_mismatch(format!(
            "cannot apply `{}` to {}",
            match op {
                UnaryOp::Not => "!",
                UnaryOp::Neg => "-",
            },
            v.map(Value::kind).unwrap_or("no value")
        ))),
    }
}

#[derive(Clone, Copy)]
enum Num {
    I(i32),
    L(i64),
    D(f64),
}

fn num(v: &Value) -> Option<Num> {
    match v {
        Value::Int(i) => Some(Num::I(*i)),
        Value::Long(i) => Some(Num::L(*i)),
        Value::Double(d) => Some(Num::D(*d)),
        _ => None,
    }
}

fn as_f64(n: Num) -> f64 {
    match n {
        Num::I(i) => f64::from(i),
        Num::L(i) => i as f64,
        Num::D(d) => d,
    }
}

fn as_i64(n: Num) -> i64 {
    match n {
        Num::I(i) => i64::from(i),
        Num::L(i) => i,
        Num::D(d) => d as i64,
    }
}

/// An absent operand behaves as the zero of the other operand's kind.
fn zero_like(v: &Value) -> Value {
    match v {
        Value::Bool(_) => Value::Bool(false),
        Value::Int(_) => Value::Int(0),
        Value::Long(_) => Value::Long(0),
        Value::Double(_) => Value::Double(0.0),
        Value::Str(_) => Value::Str(String::new()),
    }
}

fn fill<'a>(
    op: BinaryOp,
    a: Option<&'a Value>,
    b: Option<&'a Value>,
) -> Result<(Value, Value), Fault> {
    match (a, b) {
        (Some(a), Some(b)) => Ok((a.clone(), b.clone())),
        (Some(a), None) => Ok((a.clone(), zero_like(a))),
        (None, Some(b)) => Ok((zero_like(b), b.clone())),
        (None, None) => Err(type_mismatch(format!(
            "both operands of `{}` have no value",
            op.symbol()
        ))),
    }
}

fn values_equal(a: Option<&Value>, b: Option<&Value>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(a), Some(b)) => match (num(a), num(b)) {
            (Some(Num::D(_)), Some(_)) | (Some(_), Some(Num::D(_))) => {
                as_f64(num(a).unwrap()) == as_f64(num(b).unwrap())
            }
            (Some(x), Some(y)) => as_i64(x) == as_i64(y),
            _ => a == b,
        },
        _ => false,
    }
}

pub(crate) fn binary(op: BinaryOp, a: Option<&Value>, b: Option<&Value>) -> Result<Value, Fault> {
    match op {
        BinaryOp::Eq => return Ok(Value::Bool(values_equal(a, b))),
        BinaryOp::NotEq => return Ok(Value::Bool(!values_equal(a, b))),
        BinaryOp::And | BinaryOp::Or => {
            return match (a, b) {
                (Some(Value::Bool(x)), Some(Value::Bool(y))) => {
                    Ok(Value::Bool(if op == BinaryOp::And {
                        *x && *y
                    } else {
                        *x || *y
                    }))
                }
                _ => Err(type_mismatch(format!(
                    "operands of `{}` must be bool",
                    op.symbol()
                ))),
            }
        }
        _ => {}
    }
    let (a, b) = fill(op, a, b)?;
    match op {
        BinaryOp::Lt | BinaryOp::LtEq | BinaryOp::Gt | BinaryOp::GtEq => {
            let ord = match (&a, &b) {
                (Value::Str(x), Value::Str(y)) => Some(x.cmp(y)),
                _ => match (num(&a), num(&b)) {
                    (Some(x @ (Num::I(_) | Num::L(_))), Some(y @ (Num::I(_) | Num::L(_)))) => {
                        Some(as_i64(x).cmp(&as_i64(y)))
                    }
                    (Some(x), Some(y)) => as_f64(x).partial_cmp(&as_f64(y)),
                    _ => {
                        return Err(type_mismatch(format!(
                            "cannot order {} and {}",
                            a.kind(),
                            b.kind()
                        )))
                    }
                },
            };
            let result = match ord {
                None => false,
                Some(o) => match op {
                    BinaryOp::Lt => o == Ordering::Less,
                    BinaryOp::LtEq => o != Ordering::Greater,
                    BinaryOp::Gt => o == Ordering::Greater,
                    _ => o != Ordering::Less,
                },
            };
            Ok(Value::Bool(result))
        }
        _ => arithmetic(op, &a, &b),
    }
}

fn arithmetic(op: BinaryOp, a: &Value, b: &Value) -> Result<Value, Fault> {
    if op == BinaryOp::Add && (matches!(a, Value::Str(_)) || matches!(b, Value::Str(_))) {
        return Ok(Value::Str(format!("{a}{b}")));
    }
    let (Some(x), Some(y)) = (num(a), num(b)) else {
        return Err(type_mismatch(format!(
            "cannot apply `{}` to {} and {}",
            op.symbol(),
            a.kind(),
            b.kind()
        )));
    };
    let div_zero = || Fault::message(faults::ARITHMETIC_ERROR, "division by zero");
    Ok(match (x, y) {
        (Num::I(x), Num::I(y)) => Value::Int(match op {
            BinaryOp::Add => x.wrapping_add(y),
            BinaryOp::Sub => x.wrapping_sub(y),
            BinaryOp::Mul => x.wrapping_mul(y),
            _ if y == 0 => return Err(div_zero()),
            _ => x.wrapping_div(y),
        }),
        (Num::D(_), _) | (_, Num::D(_)) => {
            let (x, y) = (as_f64(x), as_f64(y));
            Value::Double(match op {
                BinaryOp::Add => x + y,
                BinaryOp::Sub => x - y,
                BinaryOp::Mul => x * y,
                _ if y == 0.0 => return Err(div_zero()),
                _ => x / y,
            })
        }
        _ => {
            let (x, y) = (as_i64(x), as_i64(y));
            Value::Long(match op {
                BinaryOp::Add => x.wrapping_add(y),
                BinaryOp::Sub => x.wrapping_sub(y),
                BinaryOp::Mul => x.wrapping_mul(y),
                _ if y == 0 => return Err(div_zero()),
                _ => x.wrapping_div(y),
            })
        }
    })
}
