fn main() {
    std::process::exit(hart::cli::run(std::env::args_os()));
}
