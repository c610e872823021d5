fn main() {
    std::process::exit(pi_forge_cli::run(std::env::args_os()));
}
