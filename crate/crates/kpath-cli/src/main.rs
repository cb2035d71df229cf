use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod text;

#[derive(Parser)]
#[command(name = "kpath", version, about = "Analyse higher-rank graphs, their path spaces and path groupoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a presentation and check the factorisation property.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Decide local finite alignment.
    Align {
        #[command(flatten)]
        common: Common,
        /// A single morphism to decide.
        #[arg(long)]
        element: Option<String>,
        /// Decide every morphism within the bound (the default without --element).
        #[arg(long)]
        all: bool,
        /// Also run the structure suites for FA(Λ).
        #[arg(long)]
        structure: bool,
    },
    /// Enumerate filters and report the path space and boundary path space.
    Paths {
        #[command(flatten)]
        common: Common,
        /// Morphism whose cylinder gets a compactness probe (default: every vertex).
        #[arg(long)]
        probe: Option<String>,
    },
    /// Enumerate the path groupoid and check its axioms.
    Groupoid {
        #[command(flatten)]
        common: Common,
        /// Compare with Spielberg's groupoid (finitely aligned graphs only).
        #[arg(long)]
        spielberg: bool,
        /// Compare nondiscrete points of F(FAr(Λ)) and PS(Λ) on tg.
        #[arg(long)]
        compare_relative: bool,
    },
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Catalog name or path to a presentation file.
    #[arg(long)]
    pub graph: String,
    /// Degree bound, e.g. `2,2`.
    #[arg(long)]
    pub bound: Option<String>,
    /// Family cutoff for indexed presentations.
    #[arg(long, default_value_t = 3)]
    pub cutoff: u32,
    /// Number of blocks for tg-infinity.
    #[arg(long, default_value_t = 2)]
    pub blocks: u32,
    /// Size of grid and cycle.
    #[arg(long, default_value_t = 2)]
    pub size: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for sampled suites; exhaustive when absent.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, result) = match &cli.command {
        Command::Validate { common } => (common, commands::validate(common)),
        Command::Align { common, element, all, structure } => {
            (common, commands::align(common, element.as_deref(), *all, *structure))
        }
        Command::Paths { common, probe } => (common, commands::paths(common, probe.as_deref())),
        Command::Groupoid { common, spielberg, compare_relative } => {
            (common, commands::groupoid(common, *spielberg, *compare_relative))
        }
    };
    match result {
        Ok(report) => {
            match common.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("serializable")),
                Format::Text => print!("{}", text::render(&report.json)),
            }
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
