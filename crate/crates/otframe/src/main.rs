fn main() {
    std::process::exit(otframe::cli::cli_main(std::env::args_os()));
}
