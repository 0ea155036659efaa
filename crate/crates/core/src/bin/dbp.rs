fn main() {
    std::process::exit(babai_core::cli::dbp::main_with(std::env::args_os()));
}
