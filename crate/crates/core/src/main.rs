fn main() {
    std::process::exit(edgerem::cli::run(std::env::args_os()));
}
