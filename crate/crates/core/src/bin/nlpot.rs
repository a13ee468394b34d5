fn main() {
    std::process::exit(nlpot::cli::run_from(std::env::args_os()));
}
