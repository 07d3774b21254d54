//! JSON ↔ [`ValueTree`] mapping used by configuration files and the HTTP
//! transport.
//!
//! * a scalar is a root-valued leaf: integral numbers decode as `long`,
//!   fractional or exponent numbers as `double`, strings and booleans
//!   directly, `null` as an empty node;
//! * an object maps to children, with the reserved key `$` holding a root
//!   value that coexists with children;
//! * an array value of a key is a sequence of occurrences of that child;
//!   a single occurrence is written as the bare element.

use crate::value::{Value, ValueTree};
use serde_json::{Map, Number, Value as Json};
use thiserror::Error;

/// Key that carries the root value of a node that also has children.
pub const ROOT_KEY: &str = "$";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JsonError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unsupported JSON shape at `{path}`: {message}")]
    Shape { path: String, message: String },
}

pub fn encode_json(tree: &ValueTree) -> Vec<u8> {
    serde_json::to_vec(&to_json(tree)).expect("serializing a JSON value cannot fail")
}

pub fn decode_json(bytes: &[u8]) -> Result<ValueTree, JsonError> {
    let json: Json = serde_json::from_slice(bytes).map_err(|e| JsonError::Syntax {
        line: e.line(),
        col: e.column(),
        message: e.to_string(),
    })?;
    from_json(&json)
}

pub fn to_json(tree: &ValueTree) -> Json {
    if !tree.has_children() {
        return tree
            .root()
            .map(scalar)
            .unwrap_or_else(|| Json::Object(Map::new()));
    }
    let mut map = Map::new();
    if let Some(root) = tree.root() {
        map.insert(ROOT_KEY.to_string(), scalar(root));
    }
    for (name, seq) in tree.children() {
        let value = if seq.len() == 1 {
            to_json(&seq[0])
        } else {
            Json::Array(seq.iter().map(to_json).collect())
        };
        map.insert(name.to_string(), value);
    }
    Json::Object(map)
}

fn scalar(value: &Value) -> Json {
    match value {
        Value::Bool(b) => Json::Bool(*b),
        Value::Int(v) => Json::Number((*v).into()),
        Value::Long(v) => Json::Number((*v).into()),
        Value::Double(d) => Number::from_f64(*d).map(Json::Number).unwrap_or(Json::Null),
        Value::Str(s) => Json::String(s.clone()),
    }
}

pub fn from_json(json: &Json) -> Result<ValueTree, JsonError> {
    node(json, "")
}

fn node(json: &Json, path: &str) -> Result<ValueTree, JsonError> {
    match json {
        Json::Array(_) => Err(JsonError::Shape {
            path: display_path(path),
            message: "arrays are only allowed as the value of an object key".into(),
        }),
        Json::Object(map) => {
            let mut tree = ValueTree::new();
            for (key, value) in map {
                let child_path = if path.is_empty() {
                    key.clone()
                } else {
                    format!("{path}.{key}")
                };
                if key == ROOT_KEY {
                    match value {
                        Json::Array(_) | Json::Object(_) => {
                            return Err(JsonError::Shape {
                                path: child_path,
                                message: "root value must be a scalar".into(),
                            })
                        }
                        other => tree.set_root(decode_scalar(other)),
                    }
                    continue;
                }
                match value {
                    Json::Array(items) => {
                        let seq = items
                            .iter()
                            .enumerate()
                            .map(|(i, item)| node(item, &format!("{child_path}[{i}]")))
                            .collect::<Result<Vec<_>, _>>()?;
                        tree.set_children(key.clone(), seq);
                    }
                    other => tree.push_child(key.clone(), node(other, &child_path)?),
                }
            }
            Ok(tree)
        }
        other => {
            let mut tree = ValueTree::new();
            tree.set_root(decode_scalar(other));
            Ok(tree)
        }
    }
}

fn decode_scalar(json: &Json) -> Option<Value> {
    match json {
        Json::Null => None,
        Json::Bool(b) => Some(Value::Bool(*b)),
        Json::String(s) => Some(Value::Str(s.clone())),
        Json::Number(n) => Some(match n.as_i64() {
            Some(v) => Value::Long(v),
            None => Value::Double(n.as_f64().unwrap_or(f64::NAN)),
        }),
        Json::Array(_) | Json::Object(_) => None,
    }
}

fn display_path(path: &str) -> String {
    if path.is_empty() {
        "<root>".into()
    } else {
        path.into()
    }
}
