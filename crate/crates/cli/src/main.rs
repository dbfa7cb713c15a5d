mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(
    name = "lattice-dse",
    version,
    about = "Lattice phi^4: classical waves, gap equation, cumulants, Bloch spectra, Monte Carlo checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "LATTICE_DSE_THREADS")]
    threads: Option<usize>,
    /// Monte Carlo seed (overrides mc.seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// sn-wave equation-of-motion residuals under refinement of the spacing.
    ClassicalVerify,
    /// Gap equation on a constant background.
    Gap,
    /// Coincident three-point cumulant against volume.
    Cumulants,
    /// Bloch propagator on an sn-wave background and its pole weights.
    LameSpectrum,
    /// Metropolis propagator against the gap-equation propagator.
    McCompare,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::ClassicalVerify => "classical-verify",
            Command::Gap => "gap",
            Command::Cumulants => "cumulants",
            Command::LameSpectrum => "lame-spectrum",
            Command::McCompare => "mc-compare",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let mut cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        },
        None => RunConfig::default(),
    };
    if let Some(dir) = cli.out {
        cfg.output.dir = dir;
    }
    if let Some(seed) = cli.seed {
        cfg.mc.seed = seed;
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }

    match run(cli.command, &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command, cfg: &RunConfig) -> anyhow::Result<()> {
    let outcome = match command {
        Command::ClassicalVerify => commands::classical_verify(cfg)?,
        Command::Gap => commands::gap(cfg)?,
        Command::Cumulants => commands::cumulants(cfg)?,
        Command::LameSpectrum => commands::lame_spectrum(cfg)?,
        Command::McCompare => commands::mc_compare(cfg)?,
    };
    std::fs::create_dir_all(&cfg.output.dir)?;
    let report = output::report(command.name(), cfg, outcome.results);
    output::write_report(&cfg.output.dir, &report)?;
    if cfg.output.csv {
        for table in &outcome.tables {
            table.write(&cfg.output.dir)?;
        }
    }
    println!(
        "{}: report written to {}",
        command.name(),
        cfg.output.dir.join("report.json").display()
    );
    Ok(())
}
