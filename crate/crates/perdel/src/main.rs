fn main() {
    std::process::exit(perdel::cli::main());
}
