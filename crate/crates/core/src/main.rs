fn main() {
    std::process::exit(bitdist::cli::run(std::env::args_os()));
}
