fn main() {
    std::process::exit(revspy::cli::run());
}
