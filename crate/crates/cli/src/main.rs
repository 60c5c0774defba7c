fn main() {
    std::process::exit(kgddi_cli::run(std::env::args_os()));
}
