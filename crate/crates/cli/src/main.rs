use std::process::ExitCode;

use clap::Parser;
use symconv_cli::args::Cli;
use symconv_cli::{run, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::from(Cli::parse());
    match run(&config) {
        Ok(report) => {
            for img in &report.images {
                eprintln!("{}: {}", img.input.display(), img.dir.join("detections.json").display());
            }
            if report.pr.is_some() {
                eprintln!("pr curve: {}", config.out.join("pr.csv").display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
