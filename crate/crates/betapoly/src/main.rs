use std::io::Write;

fn main() {
    let out = betapoly::cli::execute(
        std::env::args_os(),
        std::env::var(betapoly::cli::SEED_ENV).ok(),
    );
    std::io::stdout().write_all(out.stdout.as_bytes()).ok();
    std::io::stderr().write_all(out.stderr.as_bytes()).ok();
    std::process::exit(out.code);
}
