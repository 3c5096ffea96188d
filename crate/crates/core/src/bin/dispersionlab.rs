fn main() {
    std::process::exit(dispersionlab::cli::main_from_env());
}
