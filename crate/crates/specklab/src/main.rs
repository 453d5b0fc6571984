use clap::Parser;

fn main() {
    let cli = specklab::cli::Cli::parse();
    if let Err(err) = specklab::cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(if err.is_validation() { 2 } else { 1 });
    }
}
