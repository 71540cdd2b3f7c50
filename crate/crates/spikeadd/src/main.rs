fn main() {
    std::process::exit(spikeadd::cli::run());
}
