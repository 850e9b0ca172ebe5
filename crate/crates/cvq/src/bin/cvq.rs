fn main() {
    std::process::exit(cvq::cli::run(std::env::args_os()));
}
