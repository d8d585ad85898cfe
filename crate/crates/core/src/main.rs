fn main() {
    std::process::exit(csstd::cli::run(std::env::args_os()));
}
