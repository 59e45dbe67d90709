fn main() {
    std::process::exit(ektau::cli::run(std::env::args_os()));
}
