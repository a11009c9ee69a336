use std::process::ExitCode;

use clap::Parser;
use hypergeo_cli::{run, table, tolerance_from_env, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = tolerance_from_env().and_then(|tol| run(&cli, tol));
    match outcome {
        Ok(out) => {
            if cli.pretty {
                println!("{}", table::render(&out.value));
            } else {
                println!("{}", out.json());
            }
            ExitCode::from(out.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
