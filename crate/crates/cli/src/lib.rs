//! Command implementations shared by the `sliceable` and `sliceable-run`
//! binaries.
//!
//! Diagnostics go to stderr as `<path>:<line>:<col>: error: <message>`;
//! manifests and run reports go to stdout. Exit status is 0 on success, 1
//! when an executable service ends with a fault, 2 for usage, parse,
//! resolution or configuration errors.

use clap::{Args, Parser, Subcommand};
use sliceable_core::config::{load_config, validate_config_for, ConfigError, ConfigTree};
use sliceable_core::deploy::{self, PlanOptions, DEFAULT_BASE_IMAGE, DEFAULT_RUNNER_CMD};
use sliceable_core::json::JsonError;
use sliceable_core::runtime::{self, RuntimeOptions};
use sliceable_core::{parse_source, resolve, slice_all, CheckedProgram};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

pub const EXIT_FAULT: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sliceable",
    version,
    about = "Check, run and slice service programs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and resolve a program, reporting diagnostics.
    Check { program: PathBuf },
    /// Run services of a program; executable services run to completion.
    Run(RunArgs),
    /// Split a program into one deployable folder per service.
    Slice(SliceArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON configuration providing port locations.
    #[arg(long)]
    pub config: PathBuf,
    /// Run only this service (repeatable; default: all).
    #[arg(long = "service", value_name = "SERVICE")]
    pub services: Vec<String>,
    /// Seconds in-flight requests get to finish at shutdown.
    #[arg(long, default_value_t = 5.0, value_name = "SECS")]
    pub drain_timeout: f64,
    /// Seconds a request-response call waits for its answer.
    #[arg(long, default_value_t = 30.0, value_name = "SECS")]
    pub request_timeout: f64,
    pub program: PathBuf,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    /// JSON configuration copied into every service folder.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (default: `<program stem>-sliced`).
    #[arg(short, long, value_name = "DIR")]
    pub output: Option<PathBuf>,
    /// Leave this service out of the deployment (repeatable).
    #[arg(long, value_name = "SERVICE")]
    pub exclude: Vec<String>,
    #[arg(long, default_value = DEFAULT_BASE_IMAGE, value_name = "IMAGE")]
    pub base_image: String,
    /// Command the container runs, given `--config`, `--service` and the program.
    #[arg(long, default_value = DEFAULT_RUNNER_CMD, value_name = "CMD")]
    pub runner_cmd: String,
    /// Publish each service's input port in the compose file.
    #[arg(long)]
    pub expose_ports: bool,
    /// Write into an existing non-empty output directory.
    #[arg(long)]
    pub force: bool,
    pub program: PathBuf,
}

const SUBCOMMANDS: [&str; 4] = ["check", "run", "slice", "help"];

/// Inserts `slice` when the first argument is neither a subcommand nor a
/// top-level flag, so `sliceable --config C P` means `sliceable slice --config C P`.
pub fn with_default_subcommand(args: Vec<OsString>) -> Vec<OsString> {
    let Some(first) = args.get(1).and_then(|a| a.to_str()) else {
        return args;
    };
    if SUBCOMMANDS.contains(&first) || matches!(first, "-h" | "--help" | "-V" | "--version") {
        return args;
    }
    let mut out = args;
    out.insert(1, "slice".into());
    out
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with(args: Vec<OsString>) -> ExitCode {
    let cli = match Cli::try_parse_from(with_default_subcommand(args)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    let code = match cli.command {
        Command::Check { program } => check(&program),
        Command::Run(args) => run(&args),
        Command::Slice(args) => slice(&args),
    };
    ExitCode::from(code)
}

fn error(location: impl std::fmt::Display, message: impl std::fmt::Display) {
    eprintln!("{location}: error: {message}");
}

/// Reads, parses and resolves a program, printing diagnostics.
fn load_program(path: &Path) -> Result<CheckedProgram, u8> {
    let shown = path.display();
    let text = std::fs::read_to_string(path).map_err(|e| {
        error(&shown, format!("cannot read program: {e}"));
        EXIT_ERROR
    })?;
    let parsed = parse_source(&text, &path.to_string_lossy()).map_err(|e| {
        let (line, col) = e.position();
        error(format!("{shown}:{line}:{col}"), e.message());
        EXIT_ERROR
    })?;
    let checked = resolve(parsed).map_err(|errors| {
        for e in errors {
            error(format!("{shown}:{}", e.span), &e.kind);
        }
        EXIT_ERROR
    })?;
    for w in checked.warnings() {
        eprintln!("{shown}:{}: warning: {}", w.span, w.message);
    }
    Ok(checked)
}

fn config_error(path: &Path, e: &ConfigError) {
    match e {
        ConfigError::Json(JsonError::Syntax { line, col, message }) => {
            error(format!("{}:{line}:{col}", path.display()), message)
        }
        ConfigError::Io { source, .. } => error(
            path.display(),
            format!("cannot read configuration: {source}"),
        ),
        other => error(path.display(), other),
    }
}

fn load(path: &Path) -> Result<ConfigTree, u8> {
    load_config(path).map_err(|e| {
        config_error(path, &e);
        EXIT_ERROR
    })
}

fn validate(
    config_path: &Path,
    checked: &CheckedProgram,
    config: &ConfigTree,
    services: &[&str],
) -> Result<(), u8> {
    validate_config_for(checked, config, services).map_err(|errors| {
        for e in &errors {
            config_error(config_path, e);
        }
        EXIT_ERROR
    })
}

pub fn check(program: &Path) -> u8 {
    match load_program(program) {
        Ok(_) => 0,
        Err(code) => code,
    }
}

fn seconds(value: f64, flag: &str) -> Result<Duration, u8> {
    Duration::try_from_secs_f64(value).map_err(|_| {
        error(
            "usage",
            format!("{flag} must be a non-negative number of seconds"),
        );
        EXIT_ERROR
    })
}

pub fn run(args: &RunArgs) -> u8 {
    match try_run(args) {
        Ok(code) | Err(code) => code,
    }
}

fn try_run(args: &RunArgs) -> Result<u8, u8> {
    let checked = load_program(&args.program)?;
    let config = load(&args.config)?;
    let selected: Vec<&str> = if args.services.is_empty() {
        checked.service_names().collect()
    } else {
        args.services.iter().map(String::as_str).collect()
    };
    let options = RuntimeOptions {
        drain_timeout: seconds(args.drain_timeout, "--drain-timeout")?,
        request_timeout: seconds(args.request_timeout, "--request-timeout")?,
        ..Default::default()
    };
    let mut system = match runtime::start(&checked, &config, &selected, options) {
        Ok(system) => system,
        Err(runtime::RuntimeError::Config(errors)) => {
            for e in &errors {
                config_error(&args.config, e);
            }
            return Err(EXIT_ERROR);
        }
        Err(e) => {
            error(args.program.display(), e);
            return Err(EXIT_ERROR);
        }
    };
    for (service, location) in system.input_locations() {
        log::info!("{service} listening on {location}");
    }

    if system.has_executables() {
        system.wait_executables();
    } else {
        let (tx, rx) = std::sync::mpsc::channel();
        if let Err(e) = ctrlc::set_handler(move || {
            let _ = tx.send(());
        }) {
            log::warn!("cannot install the interrupt handler: {e}");
        }
        let _ = rx.recv();
    }
    let report = system.shutdown();
    let mut stdout = std::io::stdout().lock();
    let _ = write!(stdout, "{report}");
    let _ = stdout.flush();
    match report.executable_fault() {
        Some((service, fault)) => {
            error(service, format!("ended with fault {fault}"));
            Ok(EXIT_FAULT)
        }
        None => Ok(0),
    }
}

pub fn slice(args: &SliceArgs) -> u8 {
    match try_slice(args) {
        Ok(()) => 0,
        Err(code) => code,
    }
}

fn try_slice(args: &SliceArgs) -> Result<(), u8> {
    let checked = load_program(&args.program)?;
    let config = load(&args.config)?;
    for name in &args.exclude {
        if checked.service(name).is_none() {
            error(
                args.program.display(),
                format!("cannot exclude `{name}`: no such service"),
            );
            return Err(EXIT_ERROR);
        }
    }
    let included: Vec<&str> = checked
        .service_names()
        .filter(|n| !args.exclude.iter().any(|e| e == n))
        .collect();
    validate(&args.config, &checked, &config, &included)?;

    let slices = slice_all(&checked).map_err(|e| {
        error(args.program.display(), e);
        EXIT_ERROR
    })?;
    let options = PlanOptions {
        exclude: args.exclude.clone(),
        base_image: args.base_image.clone(),
        runner_cmd: args.runner_cmd.clone(),
        expose_ports: args.expose_ports,
        output_root: args.output.clone(),
    };
    let source_name = args.program.to_string_lossy();
    let plan = deploy::plan_deployment(&slices, &config, &source_name, &options).map_err(|e| {
        error(args.program.display(), e);
        EXIT_ERROR
    })?;
    for w in &plan.warnings {
        eprintln!("{}: warning: {w}", args.config.display());
    }
    let manifest = deploy::write_deployment(&plan, args.force).map_err(|e| {
        error(plan.output_root.display(), e);
        EXIT_ERROR
    })?;
    let mut stdout = std::io::stdout().lock();
    for entry in manifest {
        let _ = writeln!(stdout, "{}\t{}", entry.path.display(), entry.size);
    }
    Ok(())
}
