fn main() {
    std::process::exit(nonsep::cli::main_with_args(std::env::args_os()));
}
