fn main() {
    std::process::exit(onoc_xbar::cli::run(std::env::args_os()));
}
