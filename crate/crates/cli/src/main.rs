fn main() {
    std::process::exit(bohr_cli::main_with_args(std::env::args_os()));
}
