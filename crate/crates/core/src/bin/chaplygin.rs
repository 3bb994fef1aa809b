fn main() {
    std::process::exit(chaplygin_ball::cli::main_with_args(std::env::args_os()));
}
