mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::error::Result;
use crate::output::{ensure_dir, unix_now, write_manifest, write_table, RunManifest};

fn execute(cli: Cli) -> Result<()> {
    let started = unix_now();
    let settings = commands::resolve(&cli.command, cli.command.args().clone().resolve()?)?;
    let table = commands::run(&cli.command, &settings)?;
    ensure_dir(&settings.out_dir)?;
    let csv = write_table(&settings.out_dir, &table)?;
    let manifest = RunManifest {
        command: cli.command.name(),
        version: onebit_core::VERSION,
        master_seed: settings.seed,
        started_unix: started,
        finished_unix: unix_now(),
        config: &settings,
        artifacts: vec![csv.clone()],
    };
    write_manifest(&settings.out_dir, &manifest)?;
    println!("{}", csv.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
