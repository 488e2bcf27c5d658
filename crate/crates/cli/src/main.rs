fn main() {
    std::process::exit(neurolasso_cli::main_with_args(std::env::args_os()));
}
