fn main() {
    std::process::exit(adaptflow::cli::main_with_args(std::env::args_os()));
}
