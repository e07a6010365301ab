use std::process::ExitCode;

use clap::Parser;
use qbm_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli
        .overrides
        .resolve()
        .and_then(|cfg| execute(cli.command, &cfg));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qbm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
