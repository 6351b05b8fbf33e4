fn main() {
    std::process::exit(anonytope_cli::main_with_args(std::env::args_os()));
}
