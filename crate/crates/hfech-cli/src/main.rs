fn main() {
    let code = match std::panic::catch_unwind(|| hfech_cli::run(std::env::args())) {
        Ok(code) => code,
        Err(_) => {
            eprintln!("internal invariant breach; this is an engine bug");
            hfech_cli::EXIT_INTERNAL
        }
    };
    std::process::exit(code);
}
