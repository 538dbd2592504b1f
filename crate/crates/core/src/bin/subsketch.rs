fn main() {
    std::process::exit(subsketch::cli::run(std::env::args_os()));
}
