use std::process::ExitCode;

fn main() -> ExitCode {
    fdca::cli::main_with_args(std::env::args_os())
}
