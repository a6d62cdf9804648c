fn main() {
    std::process::exit(frechet_chain_cli::run(std::env::args_os()));
}
