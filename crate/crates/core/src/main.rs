fn main() {
    std::process::exit(memqfi::cli::run(std::env::args_os()));
}
