fn main() {
    std::process::exit(monotone_lab_cli::run_command(std::env::args_os()));
}
