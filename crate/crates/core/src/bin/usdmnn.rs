fn main() {
    std::process::exit(usdmnn::cli::run(std::env::args_os()));
}
