fn main() {
    std::process::exit(acfguard::cli::run(std::env::args_os()));
}
