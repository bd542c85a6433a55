use clap::Parser;
use nisqc::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        let report = serde_json::to_string(&e.report()).unwrap_or_else(|_| format!("{e}"));
        eprintln!("{report}");
        std::process::exit(e.exit_code());
    }
}
