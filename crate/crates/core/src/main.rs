fn main() -> std::process::ExitCode {
    policy_mcdm::cli::main()
}
