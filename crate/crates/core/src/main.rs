fn main() -> std::process::ExitCode {
    cvbench::cli::run(std::env::args_os())
}
