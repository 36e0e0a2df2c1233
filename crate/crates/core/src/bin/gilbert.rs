fn main() {
    std::process::exit(gilbert::cli::main_with_args(std::env::args_os()));
}
