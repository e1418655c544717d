fn main() {
    std::process::exit(irsym_cli::run(std::env::args_os()));
}
