use clap::Parser;
use rssgeo_cli::{configure_threads, exit_code, run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(err) = configure_threads().and_then(|_| run(&cli)) {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}
