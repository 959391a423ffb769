fn main() {
    std::process::exit(xtin::cli::main());
}
