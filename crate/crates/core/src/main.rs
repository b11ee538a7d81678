fn main() {
    std::process::exit(abstraction_probe::cli::run(std::env::args_os()));
}
