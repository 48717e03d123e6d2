use std::process::ExitCode;

fn main() -> ExitCode {
    dfm_index::cli::main_with_args(std::env::args_os())
}
