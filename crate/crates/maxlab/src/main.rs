use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use maxlab_core::lab::{self, ExperimentConfig, RegionPlot, KINDS};
use maxlab_core::Error;

#[derive(Parser)]
#[command(name = "maxlab", version, about = "Experiments on bilinear and multilinear maximal averages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run { config: PathBuf },
    /// Draw the bilinear (two exponents) or trilinear (three) exponent region.
    Region {
        #[arg(long)]
        n: usize,
        /// Comma-separated exponents, e.g. `2,3`.
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<f64>,
        /// Fixed `1/p_3` for the trilinear slice.
        #[arg(long, default_value_t = 0.0)]
        x3: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the experiment kinds accepted in configs.
    ListKinds,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = lab::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(3);
    }
    match cli.command {
        Command::ListKinds => {
            let mut out = std::io::stdout().lock();
            for kind in KINDS {
                if writeln!(out, "{kind}").is_err() {
                    break;
                }
            }
            ExitCode::SUCCESS
        }
        Command::Region { n, a, x3, out } => {
            let region = match a.len() {
                2 => RegionPlot::Bilinear { n, a },
                3 => RegionPlot::Trilinear { n, a, x3 },
                k => {
                    eprintln!("error: --a needs two or three exponents, got {k}");
                    return ExitCode::from(3);
                }
            };
            let written = lab::plot_region(&region).and_then(|svg| std::fs::write(&out, svg).map_err(Error::from));
            match written {
                Ok(()) => {
                    println!("wrote {}", out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(3)
                }
            }
        }
        Command::Run { config } => {
            let result = ExperimentConfig::load(&config).and_then(|cfg| lab::run(&cfg));
            match &result {
                Ok(outcome) => {
                    println!("{:?}: {}", outcome.status, outcome.summary);
                    for f in &outcome.files {
                        println!("wrote {}", f.display());
                    }
                }
                Err(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(lab::exit_code(&result) as u8)
        }
    }
}
