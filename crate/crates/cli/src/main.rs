use clap::Parser;
use endokit_cli::{run, Cli, EXIT_USAGE};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((code, output)) => {
            print!("{output}");
            std::process::exit(code);
        }
        Err(err) => {
            eprintln!("endokit: {err}");
            std::process::exit(EXIT_USAGE);
        }
    }
}
