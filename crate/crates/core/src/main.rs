use clap::error::ErrorKind;

use dicke_corr::exec::Execution;
use dicke_corr::harness::{self, ConfigError};

fn main() {
    let code = match harness::parse_config(std::env::args_os()) {
        Ok(cfg) => match harness::execute(&cfg, Execution::default()) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Err(ConfigError::Cli(e)) => {
            let _ = e.print();
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => harness::EXIT_OK,
                _ => harness::EXIT_CONFIG,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            harness::EXIT_CONFIG
        }
    };
    std::process::exit(code);
}
