fn main() {
    std::process::exit(ncsplit::cli::main_with_args(std::env::args_os()));
}
