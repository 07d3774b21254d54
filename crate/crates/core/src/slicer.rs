//! Splitting a monolithic program into one self-contained program per
//! service.

use crate::semantic::CheckedProgram;
use crate::syntax::{Declaration, SourceProgram, TypeRef};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SliceError {
    #[error("no service named `{0}`")]
    UnknownService(String),
    #[error("the program declares no services")]
    NoServices,
}

/// Names of the types and interfaces one service needs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DependencySet {
    pub types: BTreeSet<String>,
    pub interfaces: BTreeSet<String>,
}

impl DependencySet {
    pub fn contains(&self, decl: &Declaration) -> bool {
        match decl {
            Declaration::Type(t) => self.types.contains(&t.name.name),
            Declaration::Interface(i) => self.interfaces.contains(&i.name.name),
            Declaration::Service(_) => false,
        }
    }
}

/// The transitive closure of declarations reachable from a service: the
/// interfaces of its ports, the message types of their operations, the
/// declared configuration type, and every type those mention.
pub fn compute_dependencies(
    checked: &CheckedProgram,
    service: &str,
) -> Result<DependencySet, SliceError> {
    let svc = checked
        .service(service)
        .ok_or_else(|| SliceError::UnknownService(service.to_string()))?;
    let mut deps = DependencySet::default();
    let mut pending: Vec<String> = Vec::new();
    let want = |ty: &TypeRef, pending: &mut Vec<String>| {
        ty.for_each_named(&mut |id| pending.push(id.name.clone()));
    };

    for port in svc.ports() {
        for iface in &port.interfaces {
            if !deps.interfaces.insert(iface.name.clone()) {
                continue;
            }
            let Some(decl) = checked.interface(&iface.name) else {
                continue;
            };
            for op in &decl.request_responses {
                want(&op.request, &mut pending);
                want(&op.response, &mut pending);
            }
            for op in &decl.one_ways {
                want(&op.request, &mut pending);
            }
        }
    }
    if let Some(ty) = svc.config.as_ref().and_then(|c| c.ty.as_ref()) {
        if checked.type_decl(&ty.name).is_some() {
            pending.push(ty.name.clone());
        }
    }

    while let Some(name) = pending.pop() {
        if !deps.types.insert(name.clone()) {
            continue;
        }
        if let Some(decl) = checked.type_decl(&name) {
            for field in &decl.fields {
                want(&field.ty, &mut pending);
            }
        }
    }
    Ok(deps)
}

/// The program holding `service` and exactly the declarations it depends
/// on, in their original relative order.
pub fn slice(checked: &CheckedProgram, service: &str) -> Result<SourceProgram, SliceError> {
    let deps = compute_dependencies(checked, service)?;
    let declarations = checked
        .program()
        .declarations
        .iter()
        .filter(|d| match d {
            Declaration::Service(s) => s.name.name == service,
            other => deps.contains(other),
        })
        .cloned()
        .collect();
    Ok(SourceProgram {
        source_name: format!("{service}.ol"),
        declarations,
    })
}

/// One slice per service, in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSet {
    pub slices: Vec<(String, SourceProgram)>,
}

impl SliceSet {
    pub fn get(&self, service: &str) -> Option<&SourceProgram> {
        self.slices
            .iter()
            .find(|(n, _)| n == service)
            .map(|(_, p)| p)
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &SourceProgram)> {
        self.slices.iter().map(|(n, p)| (n.as_str(), p))
    }
}

pub fn slice_all(checked: &CheckedProgram) -> Result<SliceSet, SliceError> {
    let slices = checked
        .service_names()
        .map(|name| Ok((name.to_string(), slice(checked, name)?)))
        .collect::<Result<Vec<_>, SliceError>>()?;
    if slices.is_empty() {
        return Err(SliceError::NoServices);
    }
    Ok(SliceSet { slices })
}
