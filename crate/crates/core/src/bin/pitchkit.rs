fn main() {
    std::process::exit(pitchkit::cli::main_with(std::env::args_os()));
}
