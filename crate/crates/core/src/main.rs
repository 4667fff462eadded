fn main() {
    std::process::exit(uace::cli::main_with_args(std::env::args_os()));
}
