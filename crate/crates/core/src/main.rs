fn main() {
    std::process::exit(weightcov::cli::run(std::env::args_os()));
}
