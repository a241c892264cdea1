fn main() {
    std::process::exit(hierrev::cli::cli_main(std::env::args_os()));
}
