use std::process::ExitCode;

fn main() -> ExitCode {
    spatmux::cli::main()
}
