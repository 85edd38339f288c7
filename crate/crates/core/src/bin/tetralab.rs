fn main() -> std::process::ExitCode {
    tetralab::cli::main()
}
