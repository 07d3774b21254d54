//! Executing services: all of a program in one process, or a subset per
//! process, exchanging value trees in process or over HTTP/JSON.

pub mod http;
mod instance;
mod interp;
mod system;
mod transport;

pub use http::Client;
pub use system::{start, RunningSystem};

use crate::config::{ConfigError, Location};
use crate::value::ValueTree;
use std::fmt;
use std::time::Duration;
use thiserror::Error;

/// Names of the faults raised by the runtime itself.
pub mod faults {
    pub const TYPE_MISMATCH: &str = "TypeMismatch";
    pub const UNKNOWN_OPERATION: &str = "UnknownOperation";
    pub const TRANSPORT_ERROR: &str = "TransportError";
    pub const TIMEOUT: &str = "Timeout";
    pub const ARITHMETIC_ERROR: &str = "ArithmeticError";
    pub const ABORTED: &str = "Aborted";
    pub const INVALID_LOCATION: &str = "InvalidLocation";
}

/// A named failure travelling back to the invoker, with optional data.
#[derive(Debug, Clone, PartialEq)]
pub struct Fault {
    pub name: String,
    pub data: Option<ValueTree>,
}

impl Fault {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        debug_assert!(!name.is_empty());
        Fault { name, data: None }
    }

    pub fn with_data(name: impl Into<String>, data: ValueTree) -> Self {
        Fault {
            name: name.into(),
            data: Some(data),
        }
    }

    /// A runtime fault whose data is a human-readable message.
    pub(crate) fn message(name: &str, message: impl Into<String>) -> Self {
        Fault::with_data(name, ValueTree::leaf(message.into()))
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        match &self.data {
            Some(data) => write!(f, ": {data}"),
            None => Ok(()),
        }
    }
}

impl std::error::Error for Fault {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuntimeOptions {
    /// How long a request-response invocation waits for its answer.
    pub request_timeout: Duration,
    /// How long an inline `op(x)` receive waits for a message.
    pub receive_timeout: Duration,
    /// Grace period for in-flight activations at shutdown.
    pub drain_timeout: Duration,
}

impl Default for RuntimeOptions {
    fn default() -> Self {
        RuntimeOptions {
            request_timeout: Duration::from_secs(30),
            receive_timeout: Duration::from_secs(30),
            drain_timeout: Duration::from_secs(5),
        }
    }
}

#[derive(Debug, Error)]
pub enum RuntimeError {
    #[error("no services selected")]
    NoServices,
    #[error("no service named `{0}`")]
    UnknownService(String),
    #[error("invalid configuration: {}", join(.0))]
    Config(Vec<ConfigError>),
    #[error("cannot listen on {location}: {message}")]
    Bind { location: Location, message: String },
    #[error("port `{port}` of `{service}` uses unsupported protocol `{protocol}` (only http with json format)")]
    UnsupportedProtocol {
        service: String,
        port: String,
        protocol: String,
    },
}

fn join(errors: &[ConfigError]) -> String {
    errors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Activity counters of one service over the lifetime of a system.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceReport {
    pub service: String,
    pub requests_served: u64,
    pub faults: u64,
    /// Activations still running when the drain period ran out.
    pub aborted: u64,
    /// For services with a statement-sequence `main`: how the run ended,
    /// or `None` if it had not finished.
    pub executable: Option<Result<(), Fault>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SystemReport {
    pub services: Vec<ServiceReport>,
}

impl SystemReport {
    pub fn service(&self, name: &str) -> Option<&ServiceReport> {
        self.services.iter().find(|s| s.service == name)
    }

    /// The first executable that ended with a fault.
    pub fn executable_fault(&self) -> Option<(&str, &Fault)> {
        self.services.iter().find_map(|s| match &s.executable {
            Some(Err(f)) => Some((s.service.as_str(), f)),
            _ => None,
        })
    }
}

impl fmt::Display for SystemReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.services {
            write!(
                f,
                "{}: served {}, faults {}, aborted {}",
                s.service, s.requests_served, s.faults, s.aborted
            )?;
            match &s.executable {
                Some(Ok(())) => writeln!(f, ", completed")?,
                Some(Err(fault)) => writeln!(f, ", failed with {fault}")?,
                None => writeln!(f)?,
            }
        }
        Ok(())
    }
}
