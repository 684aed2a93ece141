fn main() {
    std::process::exit(piforge::cli::run(std::env::args()));
}
