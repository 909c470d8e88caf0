fn main() {
    std::process::exit(spsdense::cli::main_with_args(std::env::args_os()));
}
