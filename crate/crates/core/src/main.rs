fn main() {
    std::process::exit(intersective::cli::main_with_args());
}
