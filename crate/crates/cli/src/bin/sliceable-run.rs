//! Runs services directly: `sliceable-run ARGS` is `sliceable run ARGS`.
//! Generated Dockerfiles use this as their entry point.

use std::ffi::OsString;
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let mut args: Vec<OsString> = std::env::args_os().collect();
    if args.is_empty() {
        args.push("sliceable-run".into());
    }
    args.insert(1, "run".into());
    sliceable_cli::main_with(args)
}
