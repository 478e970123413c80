fn main() {
    dispersion_lab::cli::main();
}
