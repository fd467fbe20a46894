fn main() {
    std::process::exit(eitgap_cli::run(std::env::args_os()));
}
