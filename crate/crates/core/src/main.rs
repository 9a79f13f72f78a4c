fn main() {
    std::process::exit(vibrolink::cli::main_with_args(std::env::args_os()));
}
