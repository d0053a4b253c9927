fn main() {
    std::process::exit(specfact::cli::main_with_args(std::env::args_os()));
}
