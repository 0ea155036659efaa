fn main() {
    std::process::exit(babai_core::cli::perr::main_with(std::env::args_os()));
}
