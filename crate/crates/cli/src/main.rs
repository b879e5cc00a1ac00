fn main() {
    std::process::exit(torusmix_cli::main_with_args(std::env::args_os()));
}
