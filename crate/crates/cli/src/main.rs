mod args;
mod commands;
mod config;
mod error;
mod output;
mod reducer;
mod run;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::ExperimentConfig;
use error::Result;

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let mut cfg = ExperimentConfig::load(&args.config)?;
            cfg.reduction = args.method.apply(cfg.reduction)?;
            cfg.time_grid.include_ties |= args.include_ties;
            if let Some(out) = args.out {
                cfg.output.path = Some(out);
            }
            cfg.validate()?;
            run::run_experiment(&cfg)
        }
        Command::Reduce(args) => commands::reduce(&args),
        Command::Decompose(args) => commands::decompose(&args),
        Command::Validate(args) => commands::validate(&args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CORRED_LOG", "warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
