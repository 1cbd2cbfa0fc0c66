//! `stmodes` command-line driver.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stmodes::config::{parse_config, parse_grid, Format, MuChoice, RunConfig};
use stmodes::pipeline::{self, Artifacts};
use stmodes::{Execution, Stage, StageExt};

#[derive(Parser)]
#[command(name = "stmodes", version, about = "Spatio-temporal squeezing eigenmodes of a noncollinear type-I OPA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Phase-matching function Φ₀ on a (q_x, Ω) grid, exact and PQDA.
    Phasematch(Common),
    /// Numerical singular values and squeezing modes.
    Decompose(Common),
    /// Analytic Gaussian model: ξ parameters, Schmidt numbers, coupling g.
    Gaussian(Common),
    /// Walk-off quantities and NPMPA validity thresholds.
    Validity(Common),
    /// μ fit and overlaps between numerical and analytic modes.
    Compare(Common),
    /// Space-time fields F(x, t) of the leading modes.
    Spacetime(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Signal grid size N_q x N_Ω, e.g. 32x96.
    #[arg(long, value_name = "NxM")]
    grid: Option<String>,
    /// Shape parameter μ, a positive number or "fit".
    #[arg(long, value_name = "VALUE|fit", allow_hyphen_values = true)]
    mu: Option<String>,
    /// Number of modes to keep.
    #[arg(long, value_name = "COUNT")]
    modes: Option<usize>,
    /// Grid file format.
    #[arg(long, value_name = "csv|bin")]
    format: Option<String>,
    /// Run on a single thread.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn load(&self) -> stmodes::Result<RunConfig> {
        let mut cfg = parse_config(&self.config)?;
        if let Some(g) = &self.grid {
            let (nq, nw) = parse_grid(g)?;
            cfg = cfg.with_grid(nq, nw)?;
        }
        if let Some(m) = &self.mu {
            cfg.mu = MuChoice::parse(m)?;
        }
        if let Some(n) = self.modes {
            if n == 0 {
                return Err(stmodes::Error::Config("--modes must be at least 1".into()));
            }
            cfg.modes = n;
        }
        if let Some(f) = &self.format {
            cfg.format = Format::parse(f)?;
        }
        Ok(cfg)
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

type Runner = fn(&RunConfig, &Common) -> stmodes::Result<Artifacts>;

fn run(cli: &Cli) -> stmodes::Result<Artifacts> {
    let (c, f): (&Common, Runner) = match &cli.command {
        Command::Phasematch(c) => (c, |cfg, c| pipeline::run_phasematch(cfg, &c.out)),
        Command::Decompose(c) => (c, |cfg, c| pipeline::run_decompose(cfg, &c.out, c.exec())),
        Command::Gaussian(c) => (c, |cfg, c| pipeline::run_gaussian(cfg, &c.out, c.exec())),
        Command::Validity(c) => (c, |cfg, c| pipeline::run_validity(cfg, &c.out)),
        Command::Compare(c) => (c, |cfg, c| pipeline::run_compare(cfg, &c.out, c.exec())),
        Command::Spacetime(c) => (c, |cfg, c| pipeline::run_spacetime(cfg, &c.out, c.exec())),
    };
    let cfg = c.load().stage(Stage::Config)?;
    f(&cfg, c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(art) => {
            for line in &art.summary {
                println!("{line}");
            }
            for file in &art.files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let mut msg = format!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                if !msg.ends_with(&s.to_string()) {
                    msg.push_str(&format!(": {s}"));
                }
                src = s.source();
            }
            eprintln!("{msg}");
            ExitCode::FAILURE
        }
    }
}
