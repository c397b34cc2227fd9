fn main() {
    std::process::exit(bessel_harmonic::cli::run(std::env::args_os()));
}
