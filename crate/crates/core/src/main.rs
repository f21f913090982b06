fn main() {
    std::process::exit(roamcurve::cli::main_with_args(std::env::args_os()));
}
