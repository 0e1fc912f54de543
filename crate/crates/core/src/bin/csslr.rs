fn main() {
    std::process::exit(csslr::cli::run(std::env::args_os()));
}
