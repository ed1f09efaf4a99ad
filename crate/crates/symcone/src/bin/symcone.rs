fn main() {
    std::process::exit(symcone::cli::run(std::env::args_os()));
}
