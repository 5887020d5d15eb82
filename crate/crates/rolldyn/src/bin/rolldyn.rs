use std::process::ExitCode;

fn main() -> ExitCode {
    rolldyn::cli::main()
}
