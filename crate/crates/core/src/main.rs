fn main() {
    std::process::exit(vfd_core::cli::run_cli(std::env::args_os()));
}
