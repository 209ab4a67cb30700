fn main() {
    std::process::exit(kdv_gibbs::cli::run_from(std::env::args_os()));
}
