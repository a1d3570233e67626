fn main() {
    std::process::exit(adjlab_cli::run(std::env::args_os()));
}
