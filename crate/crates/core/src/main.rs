fn main() {
    std::process::exit(vslab::cli::cli_dispatch(std::env::args_os()));
}
