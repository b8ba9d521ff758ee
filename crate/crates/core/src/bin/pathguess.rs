fn main() {
    std::process::exit(pathguess::harness::cli_main(std::env::args_os()));
}
