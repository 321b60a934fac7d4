fn main() {
    std::process::exit(local_entanglement::cli::main_with_args(std::env::args_os()));
}
