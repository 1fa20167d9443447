mod analyze;
mod args;
mod context;
mod failure;
mod lineage;
mod store_cmd;
mod validate;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::args::Command;
use crate::context::Context;
use crate::failure::Failure;
use crate::failure::EXIT_IO;

fn run(cli: &Cli) -> Result<u8, Failure> {
    let ctx = Context::new(&cli.global)?;
    match &cli.command {
        Command::Validate { paths } => Ok(validate::cmd_validate(&ctx, paths)),
        Command::Lineage { input, captures } => lineage::cmd_lineage(&ctx, input, captures.as_deref()),
        Command::Range { input } => lineage::cmd_range(&ctx, input),
        Command::Verify { inputs } => analyze::cmd_verify(&ctx, &inputs.paths),
        Command::Assess { inputs, scenarios, no_gate } => {
            analyze::cmd_assess(&ctx, &inputs.paths, scenarios.as_deref(), *no_gate)
        }
        Command::Store { command } => store_cmd::cmd_store(&ctx, command),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code)
        }
    }
}
