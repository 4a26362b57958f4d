//! `grassmann`: constants, sampling, spectral coordinates and identity checks
//! for invariant measures on Stiefel and Grassmann manifolds.
//!
//! Exit codes: 0 on success or a passing check, 1 on a failing check or a
//! numerical failure, 2 on a usage error or violated hypothesis. Errors are
//! also written to stdout as a JSON report.

mod args;
mod run;

use std::process::ExitCode;

use clap::error::ErrorKind;

fn main() -> ExitCode {
    let code = match args::parse_args(std::env::args_os()) {
        Ok(spec) => run::run(&spec),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            run::EXIT_PASS
        }
        Err(e) => {
            let _ = e.print();
            let msg = e.kind().to_string();
            let detail = e.render().to_string();
            let first = detail
                .lines()
                .next()
                .unwrap_or(&msg)
                .trim_start_matches("error: ");
            print!(
                "{}",
                run::error_json(None, &run::CliError::Usage(first.to_string()))
            );
            run::EXIT_USAGE
        }
    };
    ExitCode::from(code)
}
