//! Toolchain for "sliceable monolith" service programs: one source file
//! describes every service of a system. The crate parses and checks such
//! programs, runs them locally or per service over HTTP/JSON, and slices
//! them into one standalone program per service plus container and
//! orchestration descriptors.

pub mod config;
pub mod deploy;
pub mod json;
pub mod runtime;
pub mod semantic;
pub mod slicer;
pub mod syntax;
pub mod value;

pub use config::{ConfigTree, Location};
pub use semantic::{resolve, CheckedProgram};
pub use slicer::{slice, slice_all, SliceSet};
pub use syntax::{parse_source, render, SourceProgram};
pub use value::{Value, ValueTree};
