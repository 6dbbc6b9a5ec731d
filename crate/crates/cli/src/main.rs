use std::process::ExitCode;

use clap::Parser;
use storyworld_cli::{run, Cli};

fn main() -> ExitCode {
    match Cli::try_parse() {
        Ok(cli) => ExitCode::from(run(cli)),
        Err(e) => {
            let _ = e.print();
            // clap's own code 2 would read as an inconsistency here
            ExitCode::from(if e.use_stderr() { 1 } else { 0 })
        }
    }
}
