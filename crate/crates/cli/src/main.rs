fn main() {
    std::process::exit(cherw_cli::run(std::env::args_os()));
}
