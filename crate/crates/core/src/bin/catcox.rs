fn main() {
    std::process::exit(catalytic_cox::cli::run(std::env::args_os()));
}
