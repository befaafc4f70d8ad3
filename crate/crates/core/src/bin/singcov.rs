fn main() {
    std::process::exit(singcov::cli::run(std::env::args_os()));
}
