fn main() {
    std::process::exit(stackpmf::cli::main());
}
