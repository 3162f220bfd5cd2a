fn main() {
    std::process::exit(sphere_dmrg::cli::main_with_args(std::env::args_os()));
}
