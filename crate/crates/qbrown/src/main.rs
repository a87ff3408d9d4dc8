fn main() {
    std::process::exit(qbrown::cli::main_with_args(std::env::args_os()));
}
