fn main() {
    std::process::exit(adcorpus::cli::run(std::env::args_os()));
}
