fn main() {
    std::process::exit(hofix_core::cli::run(std::env::args_os()));
}
