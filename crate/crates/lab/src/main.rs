use std::process::ExitCode;

fn main() -> ExitCode {
    copies_lab::run()
}
