use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ratchet_cli::config::{Overrides, RunConfig};
use ratchet_cli::figure::{reproduce_figure, FigureId};
use ratchet_cli::run::{run_single, run_sweep, Artifact};
use ratchet_cli::{CliError, Result};
use ratchet_core::pendulum::{ScalingCurve, DEFAULT_THETA_NODES, TABLE_DX, TABLE_X_MAX};

/// Off-resonant kicked-rotor ratchet: simulations, sweeps and figure data.
#[derive(Parser)]
#[command(name = "ratchet", version)]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one model at one parameter point.
    Run(RunArgs),
    /// Run one model over the grid in the config's [sweep] section.
    Sweep(RunArgs),
    /// Write the data bundle of a figure (or `all`) into OUT/<figure>/.
    Figure {
        /// fig1a, fig1b, fig2a, fig2b, fig3 or all
        figure: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate F(x) and F(x)/x into OUT/scaling_cache.csv.
    ScalingCache {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = TABLE_X_MAX)]
        x_max: f64,
        #[arg(long, default_value_t = TABLE_DX)]
        dx: f64,
        #[arg(long, default_value_t = DEFAULT_THETA_NODES)]
        n_theta: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `model` in the config.
    #[arg(long)]
    model: Option<String>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig> {
        let overrides = Overrides {
            model: self.model.clone(),
            seed: self.seed,
        };
        RunConfig::load(&self.config, &overrides)
    }
}

fn write(art: &Artifact, dir: &Path) -> Result<()> {
    art.write(dir)?;
    for (name, _) in &art.files {
        eprintln!("wrote {}", dir.join(name).display());
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config("--threads", e.to_string()))?;
    }
    match cli.command {
        Command::Run(args) => {
            let cfg = args.load()?;
            write(&run_single(&cfg)?, &args.out)
        }
        Command::Sweep(args) => {
            let cfg = args.load()?;
            let outcome = run_sweep(&cfg)?;
            write(&outcome.artifact, &args.out)?;
            if outcome.failures > 0 {
                eprintln!(
                    "{} of {} sweep points failed; see failures.csv",
                    outcome.failures, outcome.points
                );
            }
            if outcome.failures == outcome.points {
                return Err(CliError::Model(
                    ratchet_core::RatchetError::InvalidParameter {
                        field: "sweep",
                        reason: "every sweep point failed".to_string(),
                    },
                ));
            }
            Ok(())
        }
        Command::Figure { figure, out } => {
            let ids: Vec<FigureId> = if figure == "all" {
                FigureId::ALL.to_vec()
            } else {
                vec![figure.parse()?]
            };
            for id in ids {
                write(&reproduce_figure(id)?, &out.join(id.as_str()))?;
            }
            Ok(())
        }
        Command::ScalingCache {
            out,
            x_max,
            dx,
            n_theta,
        } => {
            let curve = ScalingCurve::compute(x_max, dx, n_theta)
                .map_err(|e| CliError::from_input("scaling-cache", e))?;
            let mut art = Artifact::default();
            art.add("scaling_cache.csv", curve.to_csv());
            write(&art, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
