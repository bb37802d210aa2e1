fn main() {
    std::process::exit(eddy_glider::cli::main_with_args(std::env::args_os()));
}
