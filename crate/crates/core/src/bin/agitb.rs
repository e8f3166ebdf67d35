fn main() -> std::process::ExitCode {
    agitb::cli::main()
}
