fn main() {
    std::process::exit(parkroute::cli::cli_main(std::env::args_os()));
}
