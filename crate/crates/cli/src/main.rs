fn main() {
    let code = hollowgram_cli::cli::cli_dispatch(std::env::args_os());
    std::process::exit(code);
}
