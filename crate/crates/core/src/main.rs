fn main() {
    std::process::exit(zeckgap::cli::run(std::env::args_os()));
}
