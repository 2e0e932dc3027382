use std::process::ExitCode;

use xxz_spectra::cli;

fn main() -> ExitCode {
    env_logger::init();
    let parsed = match cli::parse_args(std::env::args().collect()) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match cli::run(&parsed) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed; see the checks_pass field of the output");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
