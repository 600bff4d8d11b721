fn main() {
    std::process::exit(signreg::cli::run(std::env::args_os()));
}
