fn main() {
    std::process::exit(poisson_american::cli::main_with_args(std::env::args_os()));
}
