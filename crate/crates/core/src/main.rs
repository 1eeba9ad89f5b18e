fn main() {
    std::process::exit(growth_forge::cli::main_with_args(std::env::args_os()));
}
