use std::io;

/// Deep derivations recurse through deep terms; give them room.
const STACK_SIZE: usize = 1 << 30;

fn main() {
    let code = std::thread::Builder::new()
        .stack_size(STACK_SIZE)
        .spawn(|| coalp::cli::run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock()))
        .expect("spawn main thread")
        .join()
        .unwrap_or(70);
    std::process::exit(code);
}
