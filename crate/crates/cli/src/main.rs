fn main() {
    std::process::exit(bispec_cli::main_with_args(std::env::args_os()));
}
