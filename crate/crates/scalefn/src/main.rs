fn main() {
    std::process::exit(scalefn::cli::run(std::env::args_os()));
}
