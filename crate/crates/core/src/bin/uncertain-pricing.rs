fn main() {
    std::process::exit(uncertain_pricing::cli::main());
}
