use clap::Parser;
use reslocus_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("reslocus: {e}");
        std::process::exit(e.exit_code());
    }
}
