fn main() {
    std::process::exit(opkernel_cli::main_with_args(std::env::args_os()));
}
