fn main() {
    std::process::exit(casimir_ball::cli::run(std::env::args_os()));
}
