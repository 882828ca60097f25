fn main() {
    std::process::exit(clockforge::cli::run(std::env::args_os()));
}
