fn main() {
    std::process::exit(coopregen::cli::main());
}
