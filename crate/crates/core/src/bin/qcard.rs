fn main() {
    std::process::exit(qcard::cli::main_with_args(std::env::args_os()));
}
