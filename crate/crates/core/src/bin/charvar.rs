fn main() {
    std::process::exit(charvar::cli::run(std::env::args_os()));
}
