fn main() {
    std::process::exit(iim::cli::run());
}
