fn main() {
    std::process::exit(lattice_fourier_cli::run(std::env::args_os()));
}
