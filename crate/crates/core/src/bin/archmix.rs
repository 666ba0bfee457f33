fn main() {
    std::process::exit(archmix::cli::run(std::env::args().collect()));
}
