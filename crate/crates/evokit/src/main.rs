use std::process::ExitCode;

use clap::Parser;
use evokit::{run, Cli, Format};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // bad arguments count as a parse error
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = run(&cli);
    let out = outcome.render(cli.format);
    if outcome.code != 0 && cli.format == Format::Text {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    ExitCode::from(outcome.code as u8)
}
