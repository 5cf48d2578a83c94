fn main() {
    std::process::exit(credx::cli::run(std::env::args_os()));
}
