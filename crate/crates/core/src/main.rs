fn main() {
    std::process::exit(semiclassical_nls::cli::main_with(std::env::args_os()));
}
