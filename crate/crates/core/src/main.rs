fn main() {
    std::process::exit(curv::cli::run_from(std::env::args_os()));
}
