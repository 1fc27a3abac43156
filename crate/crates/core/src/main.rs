fn main() {
    std::process::exit(maxent_bo::cli::main_with_args(std::env::args_os()));
}
