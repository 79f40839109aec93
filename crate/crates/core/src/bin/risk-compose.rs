fn main() {
    std::process::exit(risk_compose::cli::run(std::env::args_os()));
}
