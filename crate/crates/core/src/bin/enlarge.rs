fn main() {
    std::process::exit(enlargement::cli::run(std::env::args_os()));
}
