fn main() {
    std::process::exit(monowave::cli::main_with_args(std::env::args_os()));
}
