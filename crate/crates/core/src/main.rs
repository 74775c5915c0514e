fn main() -> std::process::ExitCode {
    cavity_eit::cli::main()
}
