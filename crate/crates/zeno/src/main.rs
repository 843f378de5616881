use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use zeno::{run, Mode, Options};

#[derive(Parser)]
#[command(name = "zeno", version, about = "Operator quantum Zeno experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment: check, fig2, fig3, ising or custom.
    Run {
        mode: Mode,
        config: PathBuf,
        /// Output directory (overrides `output` in the config).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        workers: Option<usize>,
        /// Base seed (overrides `seed` in the config).
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let Command::Run { mode, config, output, workers, seed } = Cli::parse().command;
    match run(mode, &config, &Options { output, workers, seed }) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
