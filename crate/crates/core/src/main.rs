use std::process::ExitCode;

fn main() -> ExitCode {
    hapris::cli::main()
}
