fn main() {
    std::process::exit(shapebench::cli::main_with(std::env::args_os()));
}
