fn main() {
    std::process::exit(scaling_atlas::cli::run(std::env::args_os()));
}
