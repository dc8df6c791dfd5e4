mod args;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};

use args::{Cli, Command, TraceCommand};
use commands::Output;
use config::{resolve_plan, ConfigFile};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: worker pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    let file = match cli.config.as_deref().map(ConfigFile::load).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => usage_error(e),
    };
    let output = Output {
        dir: cli.out_dir.clone().unwrap_or_else(|| PathBuf::from(".")),
    };
    match dispatch(&cli.command, &file, &output) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Bad flag values or combinations: print them with the usage text and exit.
fn usage_error(e: anyhow::Error) -> ! {
    Cli::command()
        .error(ErrorKind::ValueValidation, format!("{e:#}"))
        .exit()
}

fn dispatch(command: &Command, file: &ConfigFile, output: &Output) -> Result<()> {
    let plan = |point, run| resolve_plan(file, point, run).unwrap_or_else(|e| usage_error(e));
    match command {
        Command::Analyze(args) => {
            let mut p = plan(&args.point, None);
            if let Some(alpha) = args.alpha {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    usage_error(anyhow::anyhow!("--alpha must be positive, got {alpha}"));
                }
                p.alpha = alpha;
            }
            commands::analyze(&p, args, output)
        }
        Command::Simulate(args) => {
            let mut p = plan(&args.point, Some(&args.run));
            p.best_period |= args.best_period;
            commands::simulate(&p, &args.run, output)
        }
        Command::Sweep(args) => commands::sweep(&plan(&args.point, Some(&args.run)), &args.run, output),
        Command::Trace(TraceCommand::Export(args)) => {
            let mut p = plan(&args.point, None);
            if let Some(seed) = args.seed {
                p.base_seed = seed;
            }
            if let Some(shape) = args.false_shape {
                p.false_shape = shape;
            }
            commands::export(&p, args)
        }
        Command::Trace(TraceCommand::Import(args)) => commands::import(args),
    }
}
