fn main() {
    std::process::exit(texfx::cli::run(std::env::args_os()));
}
