fn main() {
    std::process::exit(shearfree::cli::main_with_args(std::env::args_os()));
}
