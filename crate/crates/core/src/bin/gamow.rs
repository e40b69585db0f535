fn main() {
    std::process::exit(gamow::cli::run(std::env::args_os()));
}
