//! Structural conformance of runtime values against declared types.

use super::CheckedProgram;
use crate::syntax::{BasicType, FieldDecl, TypeRef};
use crate::value::{Value, ValueTree};
use std::fmt;

/// One place where a value departs from its type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() {
            "."
        } else {
            &self.path
        };
        write!(
            f,
            "at `{path}`: expected {}, found {}",
            self.expected, self.found
        )
    }
}

/// Checks `tree` against `ty`, collecting every violation.
pub fn check_value(
    program: &CheckedProgram,
    tree: &ValueTree,
    ty: &TypeRef,
) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    check_node(program, tree, ty, &mut String::new(), &mut violations);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

fn shape<'a>(program: &'a CheckedProgram, ty: &'a TypeRef) -> Option<(BasicType, &'a [FieldDecl])> {
    match ty {
        TypeRef::Basic(b) => Some((*b, &[])),
        TypeRef::Named(id) => program
            .type_decl(&id.name)
            .map(|d| (d.root, d.fields.as_slice())),
        TypeRef::Inline { root, fields } => Some((*root, fields.as_slice())),
    }
}

fn describe(ty: &TypeRef) -> String {
    match ty {
        TypeRef::Basic(b) => b.keyword().to_string(),
        TypeRef::Named(id) => id.name.clone(),
        TypeRef::Inline { root, .. } => format!("{root} {{ ... }}"),
    }
}

/// Whether a root value is acceptable for a declared basic type. Lossless
/// widenings int→long and int→double are allowed.
pub(crate) fn root_accepts(expected: BasicType, found: Option<&Value>) -> bool {
    matches!(
        (expected, found),
        (BasicType::Any, _)
            | (BasicType::Void, None)
            | (BasicType::Bool, Some(Value::Bool(_)))
            | (BasicType::Int, Some(Value::Int(_)))
            | (BasicType::Long, Some(Value::Int(_) | Value::Long(_)))
            | (BasicType::Double, Some(Value::Double(_) | Value::Int(_)))
            | (BasicType::String, Some(Value::Str(_)))
    )
}

fn push_step(path: &mut String, name: &str, index: Option<usize>) -> usize {
    let len = path.len();
    if !path.is_empty() {
        path.push('.');
    }
    path.push_str(name);
    if let Some(i) = index {
        path.push_str(&format!("[{i}]"));
    }
    len
}

fn check_node(
    program: &CheckedProgram,
    tree: &ValueTree,
    ty: &TypeRef,
    path: &mut String,
    out: &mut Vec<Violation>,
) {
    let Some((root, fields)) = shape(program, ty) else {
        out.push(Violation {
            path: path.clone(),
            expected: format!("declared type `{}`", describe(ty)),
            found: "undefined type".into(),
        });
        return;
    };
    if !root_accepts(root, tree.root()) {
        out.push(Violation {
            path: path.clone(),
            expected: root.keyword().to_string(),
            found: tree
                .root()
                .map(|v| v.kind().to_string())
                .unwrap_or_else(|| "no value".into()),
        });
    }
    for field in fields {
        let seq = tree.child(&field.name.name);
        if !field.cardinality.admits(seq.len()) {
            let mark = push_step(path, &field.name.name, None);
            out.push(Violation {
                path: path.clone(),
                expected: format!("{} {}", field.cardinality.describe(), describe(&field.ty)),
                found: seq.len().to_string(),
            });
            path.truncate(mark);
        }
        let indexed = seq.len() > 1;
        for (i, child) in seq.iter().enumerate() {
            let mark = push_step(path, &field.name.name, indexed.then_some(i));
            check_node(program, child, &field.ty, path, out);
            path.truncate(mark);
        }
    }
    for name in tree.child_names() {
        if !fields.iter().any(|f| f.name.name == name) {
            let mark = push_step(path, name, None);
            out.push(Violation {
                path: path.clone(),
                expected: "no such field".into(),
                found: tree.child(name).len().to_string(),
            });
            path.truncate(mark);
        }
    }
}

const MAX_EXACT_DOUBLE_INT: i64 = 1 << 53;

/// Applies the type-directed conversions a JSON transport needs to restore
/// declared numeric kinds: a `long` that fits is narrowed to a declared
/// `int`, and integral values become a declared `double` when exact.
/// Anything that does not fit is left alone for [`check_value`] to report.
pub fn coerce_value(program: &CheckedProgram, tree: &mut ValueTree, ty: &TypeRef) {
    let Some((root, fields)) = shape(program, ty) else {
        return;
    };
    let converted = match (root, tree.root()) {
        (BasicType::Int, Some(Value::Long(v))) => i32::try_from(*v).ok().map(Value::Int),
        (BasicType::Double, Some(Value::Long(v))) if v.abs() <= MAX_EXACT_DOUBLE_INT => {
            Some(Value::Double(*v as f64))
        }
        (BasicType::Double, Some(Value::Int(v))) => Some(Value::Double(f64::from(*v))),
        (BasicType::Long, Some(Value::Int(v))) => Some(Value::Long(i64::from(*v))),
        _ => None,
    };
    if converted.is_some() {
        tree.set_root(converted);
    }
    for field in fields {
        for child in tree.child_mut(&field.name.name) {
            coerce_value(program, child, &field.ty);
        }
    }
}
