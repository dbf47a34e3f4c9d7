fn main() -> std::process::ExitCode {
    nftrig::cli::run()
}
