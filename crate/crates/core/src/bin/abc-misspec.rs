fn main() {
    std::process::exit(abc_misspec::cli::cli_dispatch(std::env::args_os()));
}
