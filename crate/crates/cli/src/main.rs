fn main() {
    std::process::exit(matchscope_cli::run(std::env::args()));
}
