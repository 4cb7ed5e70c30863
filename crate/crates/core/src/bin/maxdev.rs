use clap::Parser;

use maxdev::cli_io::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("maxdev: {e}");
        std::process::exit(e.exit_code());
    }
}
