fn main() {
    std::process::exit(pxfes_cli::run(std::env::args_os()));
}
