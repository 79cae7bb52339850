fn main() {
    std::process::exit(skelmeas::cli::run(std::env::args_os()));
}
