use std::process::ExitCode;

use clap::Parser;
use icc_cli::{emit, error_json, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli.command, &cli.opts).and_then(|report| {
        emit(&report, cli.opts.out.as_deref())?;
        Ok(report.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(2)
        }
    }
}
