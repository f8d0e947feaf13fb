fn main() {
    std::process::exit(roughstart::cli::main_with(std::env::args_os()));
}
