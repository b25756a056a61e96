fn main() {
    std::process::exit(simplicial_experiments::cli::main_with_args(
        std::env::args_os(),
    ));
}
