fn main() {
    std::process::exit(olk::cli::run(std::env::args_os()));
}
