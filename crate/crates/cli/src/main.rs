fn main() {
    std::process::exit(gqc_cli::run_command(std::env::args_os()));
}
