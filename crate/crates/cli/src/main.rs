use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = iel_cli::run(std::env::args(), &mut std::io::stdin());
    let written = if outcome.code == 2 {
        std::io::stderr().write_all(outcome.output.as_bytes())
    } else {
        std::io::stdout().write_all(outcome.output.as_bytes())
    };
    if written.is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.code as u8)
}
