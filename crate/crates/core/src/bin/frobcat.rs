fn main() {
    std::process::exit(frobcat::cli::main_with_args(std::env::args_os()));
}
