fn main() {
    std::process::exit(radial_euler::cli::main());
}
