fn main() {
    std::process::exit(gtheta::cli::main_with_args(std::env::args_os()));
}
