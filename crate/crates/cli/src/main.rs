fn main() {
    std::process::exit(doeblin_cli::run(std::env::args_os()));
}
