use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use surface_entropy::cli::{run, Command, Format, RunConfig};

#[derive(Parser)]
#[command(name = "surface-entropy", version, about = "Entropy estimates and bounds for torus diffeomorphisms")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Run configuration (TOML, or JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Overrides the seed of the config
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write only the JSON report or only the CSV table
    #[arg(long, global = true, value_enum)]
    format: Option<Fmt>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Separated-set counts and fitted slopes
    Entropy,
    /// Entropy rates against the dilatation and exterior-norm bounds
    BoundChain,
    /// Diagnostics of a permuted domain family
    CheckDomains,
    /// Grid dump of mu, theta and K
    MuField,
    /// Disjoint disks along a translation orbit
    BuildFamily,
}

#[derive(ValueEnum, Clone, Copy)]
enum Fmt {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = match cli.command {
        Cmd::Entropy => Command::Entropy,
        Cmd::BoundChain => Command::BoundChain,
        Cmd::CheckDomains => Command::CheckDomains,
        Cmd::MuField => Command::MuField,
        Cmd::BuildFamily => Command::BuildFamily,
    };
    let format = cli.format.map(|f| match f {
        Fmt::Json => Format::Json,
        Fmt::Csv => Format::Csv,
    });
    let mut cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        None => RunConfig::parse("").expect("empty config parses"),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    match run(cmd, &cfg, &cli.out, format) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            for flag in &outcome.flags {
                eprintln!("flagged: {flag}");
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
