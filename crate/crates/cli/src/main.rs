use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use hyperqsat_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = run(&cli, &mut out);
    let _ = out.flush();
    ExitCode::from(code)
}
