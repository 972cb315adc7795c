use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use reweigh::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = reweigh::run(&cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("reweigh: error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
