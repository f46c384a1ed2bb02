use clap::Parser;
use mie_spectra::cli::{run, Cli};

fn main() -> std::process::ExitCode {
    run(Cli::parse())
}
