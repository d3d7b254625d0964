fn main() {
    std::process::exit(mlsvm::cli::main_with_args(std::env::args_os()));
}
