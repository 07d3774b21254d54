//! Runtime data: trees with an optional basic root value and named,
//! ordered sequences of child trees.

use indexmap::IndexMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Bool(bool),
    Int(i32),
    Long(i64),
    Double(f64),
    Str(String),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Bool(_) => "bool",
            Value::Int(_) => "int",
            Value::Long(_) => "long",
            Value::Double(_) => "double",
            Value::Str(_) => "string",
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(v) => write!(f, "{v}"),
            Value::Long(v) => write!(f, "{v}"),
            Value::Double(v) => write!(f, "{v}"),
            Value::Str(s) => f.write_str(s),
        }
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<i32> for Value {
    fn from(v: i32) -> Self {
        Value::Int(v)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Long(v)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Double(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}

/// The unit of every message.
///
/// Child sequences are never empty: a name that is absent and a name with
/// zero occurrences are the same thing. Equality is order-sensitive within a
/// sequence and order-insensitive across names.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValueTree {
    root: Option<Value>,
    children: IndexMap<String, Vec<ValueTree>>,
}

impl ValueTree {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf(value: impl Into<Value>) -> Self {
        ValueTree {
            root: Some(value.into()),
            children: IndexMap::new(),
        }
    }

    pub fn root(&self) -> Option<&Value> {
        self.root.as_ref()
    }

    pub fn set_root(&mut self, value: Option<Value>) {
        self.root = value;
    }

    pub fn take_root(&mut self) -> Option<Value> {
        self.root.take()
    }

    /// True for a tree with neither a root value nor children.
    pub fn is_empty(&self) -> bool {
        self.root.is_none() && self.children.is_empty()
    }

    pub fn has_children(&self) -> bool {
        !self.children.is_empty()
    }

    pub fn children(&self) -> impl Iterator<Item = (&str, &[ValueTree])> {
        self.children
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn child_names(&self) -> impl Iterator<Item = &str> {
        self.children.keys().map(String::as_str)
    }

    /// Occurrences of `name`; empty when absent.
    pub fn child(&self, name: &str) -> &[ValueTree] {
        self.children.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn child_mut(&mut self, name: &str) -> &mut [ValueTree] {
        self.children
            .get_mut(name)
            .map(Vec::as_mut_slice)
            .unwrap_or(&mut [])
    }

    pub fn child_at(&self, name: &str, index: usize) -> Option<&ValueTree> {
        self.child(name).get(index)
    }

    /// First occurrence of `name`.
    pub fn get(&self, name: &str) -> Option<&ValueTree> {
        self.child_at(name, 0)
    }

    pub fn push_child(&mut self, name: impl Into<String>, tree: ValueTree) {
        self.children.entry(name.into()).or_default().push(tree);
    }

    /// Builder-style [`push_child`](Self::push_child).
    pub fn with_child(mut self, name: impl Into<String>, tree: ValueTree) -> Self {
        self.push_child(name, tree);
        self
    }

    /// Replaces every occurrence of `name`. An empty sequence removes it.
    pub fn set_children(&mut self, name: impl Into<String>, seq: Vec<ValueTree>) {
        let name = name.into();
        if seq.is_empty() {
            self.children.shift_remove(&name);
        } else {
            self.children.insert(name, seq);
        }
    }

    pub fn remove_child(&mut self, name: &str) -> Vec<ValueTree> {
        self.children.shift_remove(name).unwrap_or_default()
    }

    /// Mutable access to occurrence `index` of `name`, extending the sequence
    /// with empty trees as needed.
    pub fn child_mut_extend(&mut self, name: &str, index: usize) -> &mut ValueTree {
        let seq = self.children.entry(name.to_string()).or_default();
        if seq.len() <= index {
            seq.resize_with(index + 1, ValueTree::new);
        }
        &mut seq[index]
    }

    /// Follows `name`-first-occurrence steps.
    pub fn lookup<'a>(&self, steps: impl IntoIterator<Item = &'a str>) -> Option<&ValueTree> {
        let mut node = self;
        for step in steps {
            node = node.get(step)?;
        }
        Some(node)
    }

    /// The tree as it looks after crossing a JSON transport: `int` roots
    /// become `long`, and non-finite doubles (which JSON cannot carry) vanish.
    pub fn normalized_for_wire(&self) -> ValueTree {
        let root = match &self.root {
            Some(Value::Int(v)) => Some(Value::Long(i64::from(*v))),
            Some(Value::Double(d)) if !d.is_finite() => None,
            other => other.clone(),
        };
        let children = self
            .children
            .iter()
            .map(|(k, seq)| {
                (
                    k.clone(),
                    seq.iter().map(ValueTree::normalized_for_wire).collect(),
                )
            })
            .collect();
        ValueTree { root, children }
    }
}

macro_rules! leaf_from {
    ($($t:ty),*) => {
        $(impl From<$t> for ValueTree {
            fn from(v: $t) -> Self {
                ValueTree::leaf(v)
            }
        })*
    };
}

leaf_from!(Value, bool, i32, i64, f64, &str, String);

impl fmt::Display for ValueTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bytes = crate::json::encode_json(self);
        f.write_str(&String::from_utf8_lossy(&bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_ignores_name_order_but_not_sequence_order() {
        let a = ValueTree::new()
            .with_child("x", 1.into())
            .with_child("y", 2.into());
        let b = ValueTree::new()
            .with_child("y", 2.into())
            .with_child("x", 1.into());
        assert_eq!(a, b);

        let c = ValueTree::new()
            .with_child("x", 1.into())
            .with_child("x", 2.into());
        let d = ValueTree::new()
            .with_child("x", 2.into())
            .with_child("x", 1.into());
        assert_ne!(c, d);
    }

    #[test]
    fn extension_fills_with_empty_nodes() {
        let mut t = ValueTree::new();
        t.child_mut_extend("a", 2).set_root(Some(Value::Int(1)));
        assert_eq!(t.child("a").len(), 3);
        assert!(t.child("a")[0].is_empty());
        assert!(t.child("a")[1].is_empty());
        assert_eq!(t.child("a")[2].root(), Some(&Value::Int(1)));
    }

    #[test]
    fn empty_sequence_is_absence() {
        let mut t = ValueTree::new().with_child("a", 1.into());
        t.set_children("a", vec![]);
        assert_eq!(t, ValueTree::new());
        assert!(t.child("a").is_empty());
    }
}
