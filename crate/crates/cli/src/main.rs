#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::Outcome;

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Check { common, theorem } => commands::check(&common, theorem),
        Command::Eval { common, nu, log_c, averaged } => commands::eval(&common, nu, log_c, averaged),
        Command::Ap { common, family, samples } => commands::ap(&common, family.as_deref(), samples.as_deref()),
        Command::Azarin { common } => commands::azarin(&common),
        Command::Kl { common, window, real_only } => commands::kl(&common, window, real_only),
        Command::Periodic { common, spec, scan } => commands::periodic(&common, spec.as_deref(), scan),
    }
}

/// Exit status: 0 pass (or no verdict), 2 failed verdict, 1 usage or input error.
fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(Outcome::Pass | Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
