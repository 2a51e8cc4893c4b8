fn main() {
    std::process::exit(honda_verify::cli::run());
}
