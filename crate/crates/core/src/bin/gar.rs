fn main() {
    std::process::exit(gar::cli::main_with_args(std::env::args_os()));
}
