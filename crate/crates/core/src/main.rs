use std::io;

fn main() {
    let code = contnorm::cli::run_from_args(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
