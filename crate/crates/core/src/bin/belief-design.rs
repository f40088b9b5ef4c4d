fn main() {
    std::process::exit(belief_design::cli::main());
}
