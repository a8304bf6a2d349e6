fn main() {
    std::process::exit(pdm_dirac_cli::run(std::env::args_os()));
}
