fn main() {
    std::process::exit(hyperbif::cli::run(std::env::args_os()));
}
