fn main() {
    std::process::exit(spectral_limits::cli::main_entry());
}
