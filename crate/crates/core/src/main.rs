fn main() {
    std::process::exit(scale_robust::cli::run(std::env::args_os()));
}
