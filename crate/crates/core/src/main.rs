fn main() {
    std::process::exit(dirtrace::cli::run(std::env::args_os()));
}
