use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(oapl::cli::run(std::env::args_os()))
}
