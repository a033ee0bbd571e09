fn main() {
    std::process::exit(strassen_cli::run_command(std::env::args_os()));
}
