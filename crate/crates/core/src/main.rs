fn main() {
    std::process::exit(rasa_core::cli::main());
}
