fn main() {
    std::process::exit(misweave::cli::run(std::env::args_os()));
}
