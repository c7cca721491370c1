#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod context;
mod parse;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use context::{Ctx, Status};

fn run(cli: &Cli) -> anyhow::Result<Status> {
    let ctx = Ctx::new(&cli.global)?;
    if let Some(j) = cli.global.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
    }
    match &cli.command {
        Command::Solve(a) => commands::solve(&ctx, a),
        Command::Verify(a) => commands::verify(&ctx, a),
        Command::Properties(a) => commands::properties(&ctx, a),
        Command::Sweep(a) => commands::sweep(&ctx, a),
        Command::RecoverPc(a) => commands::recover_pc(&ctx, a),
        Command::Analytic(a) => commands::analytic(&ctx, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("WTV1D_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
