fn main() {
    std::process::exit(sigvol_cli::main_with_args(std::env::args_os()));
}
