use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use ss3_cli::{report, run, Cli};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&argv);
    match run(&cli, &argv) {
        Ok((rep, table)) => {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            if let Err(e) = report::emit(&mut out, &rep, table.as_ref(), cli.format) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            let _ = out.flush();
            if rep.passed() {
                ExitCode::SUCCESS
            } else {
                for c in rep.failures() {
                    eprintln!("FAILED {}: expected {}, observed {}", c.claim, c.expected, c.observed);
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
