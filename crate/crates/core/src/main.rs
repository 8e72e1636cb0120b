use std::io;

fn main() {
    // proofs and deeply nested terms are processed recursively
    let code = std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(|| pdiff::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr()))
        .expect("spawn worker thread")
        .join()
        .unwrap_or(2);
    std::process::exit(code);
}
