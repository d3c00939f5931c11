use clap::error::ErrorKind;
use clap::Parser;

use vsf_cli::cli::{execute, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = err.print();
                std::process::exit(0);
            }
            // Usage problems are configuration errors.
            eprintln!("{err}");
            std::process::exit(1);
        }
    };
    if let Err(err) = execute(cli) {
        eprintln!("{err}");
        std::process::exit(err.exit_code());
    }
}
