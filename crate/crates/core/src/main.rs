fn main() {
    std::process::exit(adine::harness::cli::cli_main(std::env::args()));
}
