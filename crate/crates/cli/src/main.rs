fn main() {
    std::process::exit(etdkit_cli::run(std::env::args_os()));
}
