fn main() {
    std::process::exit(vicm::cli::main_with_args(std::env::args_os()));
}
