fn main() {
    let (code, text) = qmonad::cli::dispatch(std::env::args_os());
    if code == qmonad::cli::EXIT_INPUT {
        eprint!("{text}");
    } else {
        print!("{text}");
    }
    std::process::exit(code);
}
