//! Deployment configuration: a JSON document decoded into a [`ValueTree`],
//! holding one `location` per service under `<ServiceName>.location`.

use crate::json::{decode_json, JsonError};
use crate::semantic::CheckedProgram;
use crate::syntax::{render_expr, Expr, Literal, PortKind};
use crate::value::{Value, ValueTree};
use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read `{}`: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration JSON: {0}")]
    Json(#[from] JsonError),
    #[error("configuration has no value at `{0}`")]
    MissingConfigPath(String),
    #[error("bad location `{0}` (expected `socket://host:port` or `local://name`)")]
    BadLocationSyntax(String),
    #[error("location expression `{0}` is neither a string literal nor a configuration path")]
    BadLocationExpression(String),
    #[error("{location} is bound by both {first} and {second}")]
    LocationCollision {
        location: Location,
        first: String,
        second: String,
    },
}

/// A transport address.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Location {
    /// HTTP over TCP.
    Socket { host: String, port: u16 },
    /// In-process delivery.
    Local { name: String },
}

impl Location {
    pub fn socket(host: impl Into<String>, port: u16) -> Self {
        Location::Socket {
            host: host.into(),
            port,
        }
    }

    pub fn local(name: impl Into<String>) -> Self {
        Location::Local { name: name.into() }
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

impl FromStr for Location {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::BadLocationSyntax(s.to_string());
        if let Some(rest) = s.strip_prefix("socket://") {
            let (host, port) = rest.rsplit_once(':').ok_or_else(bad)?;
            if !valid_name(host) {
                return Err(bad());
            }
            // digits only, no sign or leading zero, so printing gives back `s`
            if port.is_empty() || port.starts_with('0') || !port.bytes().all(|b| b.is_ascii_digit())
            {
                return Err(bad());
            }
            let port: u16 = port.parse().map_err(|_| bad())?;
            Ok(Location::socket(host, port))
        } else if let Some(name) = s.strip_prefix("local://") {
            if !valid_name(name) {
                return Err(bad());
            }
            Ok(Location::local(name))
        } else {
            Err(bad())
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Socket { host, port } => write!(f, "socket://{host}:{port}"),
            Location::Local { name } => write!(f, "local://{name}"),
        }
    }
}

/// A loaded configuration. The original bytes are kept so deployments can
/// ship an exact copy.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigTree {
    tree: ValueTree,
    source: Option<Vec<u8>>,
}

impl ConfigTree {
    pub fn from_tree(tree: ValueTree) -> Self {
        ConfigTree { tree, source: None }
    }

    pub fn from_json_bytes(bytes: &[u8]) -> Result<Self, ConfigError> {
        Ok(ConfigTree {
            tree: decode_json(bytes)?,
            source: Some(bytes.to_vec()),
        })
    }

    pub fn tree(&self) -> &ValueTree {
        &self.tree
    }

    /// The bytes the configuration was loaded from, or its JSON encoding
    /// when it was built in memory.
    pub fn to_bytes(&self) -> Vec<u8> {
        match &self.source {
            Some(bytes) => bytes.clone(),
            None => {
                let mut bytes = crate::json::encode_json(&self.tree);
                bytes.push(b'\n');
                bytes
            }
        }
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ConfigTree, ConfigError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ConfigTree::from_json_bytes(&bytes)
}

/// Evaluates a port location expression: a string literal, or a path whose
/// first step is the service's configuration parameter.
pub fn resolve_location(config: &ConfigTree, location: &Expr) -> Result<Location, ConfigError> {
    let text = match location {
        Expr::Literal(Literal::Str(s)) => s.clone(),
        Expr::Path(path) if path.steps.len() > 1 => {
            let mut node = Some(config.tree());
            let mut shown = Vec::new();
            for step in &path.steps[1..] {
                let index = match step.index.as_deref() {
                    None => 0,
                    Some(Expr::Literal(Literal::Int(i))) if *i >= 0 => *i as usize,
                    Some(Expr::Literal(Literal::Long(i))) if *i >= 0 => *i as usize,
                    Some(_) => {
                        return Err(ConfigError::BadLocationExpression(render_expr(location)))
                    }
                };
                shown.push(match step.index {
                    None => step.name.clone(),
                    Some(_) => format!("{}[{index}]", step.name),
                });
                node = node.and_then(|n| n.child_at(&step.name, index));
            }
            match node.and_then(ValueTree::root) {
                Some(Value::Str(s)) => s.clone(),
                Some(other) => return Err(ConfigError::BadLocationSyntax(other.to_string())),
                None => return Err(ConfigError::MissingConfigPath(shown.join("."))),
            }
        }
        other => return Err(ConfigError::BadLocationExpression(render_expr(other))),
    };
    text.parse()
}

/// Checks that every port of every service has a resolvable location and
/// that no two input ports bind the same address.
pub fn validate_config(
    checked: &CheckedProgram,
    config: &ConfigTree,
) -> Result<(), Vec<ConfigError>> {
    let names: Vec<&str> = checked.service_names().collect();
    validate_config_for(checked, config, &names)
}

/// [`validate_config`] restricted to the named services.
pub fn validate_config_for(
    checked: &CheckedProgram,
    config: &ConfigTree,
    services: &[&str],
) -> Result<(), Vec<ConfigError>> {
    let mut errors = Vec::new();
    let mut bound: HashMap<Location, String> = HashMap::new();
    for service in checked
        .services()
        .filter(|s| services.contains(&s.name.name.as_str()))
    {
        for port in service.ports() {
            match resolve_location(config, &port.location) {
                Ok(location) if port.kind == PortKind::Input => {
                    let owner = format!("{}.{}", service.name.name, port.name.name);
                    if let Some(first) = bound.get(&location) {
                        errors.push(ConfigError::LocationCollision {
                            location: location.clone(),
                            first: first.clone(),
                            second: owner,
                        });
                    } else {
                        bound.insert(location, owner);
                    }
                }
                Ok(_) => {}
                Err(e) => errors.push(e),
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}
