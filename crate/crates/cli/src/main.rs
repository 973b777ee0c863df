fn main() {
    std::process::exit(tailforge_cli::main_with_args(std::env::args_os()));
}
