//! Container and orchestration descriptors for a sliced program.

use crate::config::{resolve_location, ConfigError, ConfigTree, Location};
use crate::slicer::SliceSet;
use crate::syntax::{render, Declaration, PortKind, ServiceDecl, SourceProgram};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const COMPOSE_FILE: &str = "docker-compose.yml";
pub const CONFIG_FILE: &str = "deploy.json";
pub const DOCKERFILE: &str = "Dockerfile";
pub const DEFAULT_BASE_IMAGE: &str = "sliceable/runtime";
pub const DEFAULT_RUNNER_CMD: &str = "sliceable-run";

#[derive(Debug, Error)]
pub enum DeployError {
    #[error("services `{first}` and `{second}` both map to folder `{folder}`")]
    FolderNameCollision {
        first: String,
        second: String,
        folder: String,
    },
    #[error("no usable location for port `{port}` of service `{service}`: {source}")]
    MissingLocation {
        service: String,
        port: String,
        #[source]
        source: Box<ConfigError>,
    },
    #[error("no services left to deploy")]
    NoServices,
    #[error("refusing to overwrite `{}` (use --force)", .0.display())]
    RefusingToOverwrite(PathBuf),
    #[error("cannot write `{}`: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanOptions {
    pub exclude: Vec<String>,
    pub base_image: String,
    pub runner_cmd: String,
    pub expose_ports: bool,
    /// Defaults to `<source stem>-sliced`.
    pub output_root: Option<PathBuf>,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            exclude: Vec::new(),
            base_image: DEFAULT_BASE_IMAGE.to_string(),
            runner_cmd: DEFAULT_RUNNER_CMD.to_string(),
            expose_ports: false,
            output_root: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeploymentEntry {
    pub service: String,
    pub folder: String,
    pub program_file: String,
    pub program_text: String,
    pub dockerfile_text: String,
    pub exposed_port: Option<u16>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeploymentPlan {
    pub output_root: PathBuf,
    pub entries: Vec<DeploymentEntry>,
    pub compose_text: String,
    pub config_bytes: Vec<u8>,
    /// Non-fatal findings, such as a location host that orchestrator DNS
    /// will not resolve.
    pub warnings: Vec<String>,
}

/// A written file and its size in bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub size: u64,
}

pub fn default_output_root(source_name: &str) -> PathBuf {
    let file = Path::new(source_name)
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    let stem = file.strip_suffix(".ol").unwrap_or(&file);
    PathBuf::from(format!("{stem}-sliced"))
}

fn service_of(program: &SourceProgram, name: &str) -> Option<ServiceDecl> {
    program.declarations.iter().find_map(|d| match d {
        Declaration::Service(s) if s.name.name == name => Some(s.clone()),
        _ => None,
    })
}

pub fn dockerfile_text(base_image: &str, runner_cmd: &str, service: &str) -> String {
    let cmd = [
        runner_cmd,
        "--config",
        CONFIG_FILE,
        "--service",
        service,
        &format!("{service}.ol"),
    ]
    .iter()
    .map(|s| serde_json::to_string(s).expect("strings serialize"))
    .collect::<Vec<_>>()
    .join(", ");
    format!("FROM {base_image}\nCOPY {service}.ol .\nCOPY {CONFIG_FILE} .\nCMD [{cmd}]\n")
}

fn compose_text(entries: &[DeploymentEntry], expose_ports: bool) -> String {
    let mut out = String::from("services:\n");
    for e in entries {
        let _ = writeln!(out, "  {}:", e.folder);
        let _ = writeln!(out, "    build: ./{}", e.folder);
        if let (true, Some(port)) = (expose_ports, e.exposed_port) {
            let _ = writeln!(out, "    ports:\n      - \"{port}:{port}\"");
        }
        out.push_str("    deploy:\n      replicas: 1\n");
    }
    out
}

/// Builds the full set of files to emit. Pure: equal inputs give equal plans.
pub fn plan_deployment(
    slices: &SliceSet,
    config: &ConfigTree,
    source_name: &str,
    options: &PlanOptions,
) -> Result<DeploymentPlan, DeployError> {
    let mut entries: Vec<DeploymentEntry> = Vec::new();
    let mut folders: HashMap<String, String> = HashMap::new();
    let mut warnings = Vec::new();
    let mut hosts = Vec::new();

    for (name, program) in slices.iter() {
        if options.exclude.iter().any(|e| e == name) {
            continue;
        }
        let folder = name.to_ascii_lowercase();
        if let Some(first) = folders.insert(folder.clone(), name.to_string()) {
            return Err(DeployError::FolderNameCollision {
                first,
                second: name.to_string(),
                folder,
            });
        }
        let service = service_of(program, name).expect("a slice contains its service");
        let mut exposed_port = None;
        for port in service.ports() {
            let location = resolve_location(config, &port.location).map_err(|source| {
                DeployError::MissingLocation {
                    service: name.to_string(),
                    port: port.name.name.clone(),
                    source: Box::new(source),
                }
            })?;
            let Location::Socket { host, port: number } = location else {
                // output ports may be placeholders rebound at run time
                if port.kind == PortKind::Input {
                    warnings.push(format!(
                        "{name}.{}: {location} is only reachable inside one process",
                        port.name.name
                    ));
                }
                continue;
            };
            match port.kind {
                PortKind::Input => {
                    exposed_port.get_or_insert(number);
                    if host != folder {
                        warnings.push(format!(
                            "{name}.{}: host `{host}` differs from compose service `{folder}`; it will not resolve inside the deployment",
                            port.name.name
                        ));
                    }
                }
                PortKind::Output => hosts.push((name.to_string(), port.name.name.clone(), host)),
            }
        }
        entries.push(DeploymentEntry {
            service: name.to_string(),
            program_file: format!("{name}.ol"),
            program_text: render(program),
            dockerfile_text: dockerfile_text(&options.base_image, &options.runner_cmd, name),
            exposed_port,
            folder,
        });
    }
    if entries.is_empty() {
        return Err(DeployError::NoServices);
    }
    for (service, port, host) in hosts {
        if !folders.contains_key(&host) {
            warnings.push(format!(
                "{service}.{port}: host `{host}` is not a service of this deployment"
            ));
        }
    }
    let compose_text = compose_text(&entries, options.expose_ports);
    Ok(DeploymentPlan {
        output_root: options
            .output_root
            .clone()
            .unwrap_or_else(|| default_output_root(source_name)),
        entries,
        compose_text,
        config_bytes: config.to_bytes(),
        warnings,
    })
}

impl DeploymentPlan {
    /// Every file of the plan as (path relative to the output root, bytes),
    /// in emission order.
    pub fn files(&self) -> Vec<(PathBuf, Vec<u8>)> {
        let mut files = vec![(
            PathBuf::from(COMPOSE_FILE),
            self.compose_text.clone().into_bytes(),
        )];
        for e in &self.entries {
            let dir = PathBuf::from(&e.folder);
            files.push((
                dir.join(&e.program_file),
                e.program_text.clone().into_bytes(),
            ));
            files.push((dir.join(CONFIG_FILE), self.config_bytes.clone()));
            files.push((dir.join(DOCKERFILE), e.dockerfile_text.clone().into_bytes()));
        }
        files
    }
}

/// Writes the plan under its output root. Without `force`, an existing
/// non-empty root is left untouched. A root created by this call is
/// removed again if writing fails.
pub fn write_deployment(
    plan: &DeploymentPlan,
    force: bool,
) -> Result<Vec<ManifestEntry>, DeployError> {
    let root = &plan.output_root;
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| DeployError::Io { path, source }
    };
    let existed = root.exists();
    if existed && !force {
        let non_empty = fs::read_dir(root).map_err(io_err(root))?.next().is_some();
        if non_empty || !root.is_dir() {
            return Err(DeployError::RefusingToOverwrite(root.clone()));
        }
    }
    let result = (|| {
        let mut manifest = Vec::new();
        for (rel, bytes) in plan.files() {
            let path = root.join(&rel);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(io_err(parent))?;
            }
            fs::write(&path, &bytes).map_err(io_err(&path))?;
            manifest.push(ManifestEntry {
                path,
                size: bytes.len() as u64,
            });
        }
        Ok(manifest)
    })();
    if result.is_err() && !existed {
        let _ = fs::remove_dir_all(root);
    }
    result
}
