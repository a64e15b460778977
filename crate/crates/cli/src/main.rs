use std::process::ExitCode;

use cdw_bench::Cli;
use clap::Parser;

fn main() -> ExitCode {
    ExitCode::from(cdw_bench::run(&Cli::parse()))
}
