fn main() {
    std::process::exit(govsim::cli::main_with_args(std::env::args_os()));
}
