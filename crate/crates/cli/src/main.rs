mod args;
mod commands;
mod embed;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let argv = match args::merge_config_file(std::env::args_os().collect()) {
        Ok(argv) => argv,
        Err(e) => {
            eprintln!("rolegauss: {e}");
            return ExitCode::from(2);
        }
    };
    // usage errors exit with 2 from inside clap
    let cli = args::Cli::parse_from(argv);
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rolegauss: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
