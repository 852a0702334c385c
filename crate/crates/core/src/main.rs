fn main() {
    std::process::exit(hitrun::cli::run(std::env::args_os()));
}
