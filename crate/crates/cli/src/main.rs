use std::process::ExitCode;

use clap::Parser;
use kronig_cli::{emax_given, run, Cli};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    let stdout = std::io::stdout().lock();
    match run(&cli, emax_given(&args), stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kronig: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
