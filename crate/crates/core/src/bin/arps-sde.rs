fn main() {
    std::process::exit(arps_sde::cli::run_cli(std::env::args_os()));
}
