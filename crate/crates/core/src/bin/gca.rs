fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(gca_core::cli::run(&argv));
}
