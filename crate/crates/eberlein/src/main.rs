fn main() {
    std::process::exit(eberlein::cli::cli_main(std::env::args_os()));
}
