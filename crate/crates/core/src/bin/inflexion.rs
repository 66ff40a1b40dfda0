fn main() {
    std::process::exit(inflexion::cli::run(std::env::args_os()));
}
