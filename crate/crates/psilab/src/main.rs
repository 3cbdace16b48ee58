fn main() {
    std::process::exit(psilab::cli::run(std::env::args_os()));
}
