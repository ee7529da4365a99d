use std::io;
use std::process::ExitCode;

use clap::Parser;

use atlbdi_cli::{run, Cli, Io};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdin = io::stdin();
    let code = run(
        cli,
        Io {
            out: &mut io::stdout(),
            err: &mut io::stderr(),
            input: &mut stdin.lock(),
        },
    );
    ExitCode::from(code as u8)
}
