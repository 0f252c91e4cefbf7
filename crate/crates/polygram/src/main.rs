fn main() {
    let code = polygram::cli::run(std::env::args().skip(1));
    std::process::exit(code);
}
