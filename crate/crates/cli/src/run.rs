//! Single runs and parameter sweeps.

use std::path::Path;

use ratchet_core::beta_spread::{quantum_beta_average, BetaSpreadParams};
use ratchet_core::eps_classical::ensemble_current;
use ratchet_core::pendulum::{scaled_current, universal_curve, DEFAULT_THETA_NODES};
use ratchet_core::quantum::{evolve, MomentumDistribution};
use ratchet_core::{RatchetError, RatchetParams};
use rayon::prelude::*;

use crate::config::{Model, RunConfig};
use crate::error::{CliError, Result};
use crate::table::{num, Table};

/// Named output files, kept in memory until written so reruns can be diffed.
#[derive(Debug, Clone, Default)]
pub struct Artifact {
    pub files: Vec<(String, String)>,
}

impl Artifact {
    pub fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_str())
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        for (name, contents) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, contents).map_err(io(&path))?;
        }
        Ok(())
    }
}

/// `F(x)/x`, from the shared table unless a non-default quadrature is asked for.
pub fn f_over_x(x: f64, n_theta: usize) -> Result<f64> {
    Ok(if n_theta == DEFAULT_THETA_NODES {
        universal_curve(x)?
    } else {
        scaled_current(x, n_theta)?
    })
}

/// `current / (-φ_d t sin γ)`; undefined (NaN) at kick 0 or `sin γ = 0`.
pub fn scaled(params: &RatchetParams, kick: usize, current: f64) -> f64 {
    let scale = params.current_scale_at(kick);
    if scale == 0.0 {
        f64::NAN
    } else {
        current / scale
    }
}

/// Current history of one model at one parameter point, plus the quantum
/// distribution history when the model has one.
struct PointRun {
    current: Vec<f64>,
    history: Option<Vec<MomentumDistribution>>,
}

fn run_point(cfg: &RunConfig, params: &RatchetParams) -> Result<PointRun> {
    Ok(match cfg.model {
        Model::Quantum => {
            let history = evolve(params, cfg.basis)?;
            let p0 = history[0].mean();
            let current = history
                .iter()
                .enumerate()
                .map(|(i, d)| if i == 0 { 0.0 } else { d.mean() - p0 })
                .collect();
            PointRun {
                current,
                history: Some(history),
            }
        }
        Model::EpsClassical => PointRun {
            current: ensemble_current(params, cfg.n_points, cfg.mode, cfg.seed)?,
            history: None,
        },
        Model::Pendulum => {
            if params.eps() == 0.0 {
                return Err(RatchetError::Resonance { eps: 0.0 }.into());
            }
            let mut current = vec![0.0];
            for t in 1..=params.kicks() {
                current.push(
                    params.current_scale_at(t) * f_over_x(params.scaling_x_at(t), cfg.n_theta)?,
                );
            }
            PointRun {
                current,
                history: None,
            }
        }
        Model::BetaSpread => PointRun {
            current: quantum_beta_average(params, cfg.delta_beta, cfg.n_beta)?,
            history: None,
        },
    })
}

/// One model at one parameter point: `current.csv`, `distribution.csv` for
/// the quantum model, and `metadata.toml`.
pub fn run_single(cfg: &RunConfig) -> Result<Artifact> {
    let p = &cfg.params;
    let meta = cfg.meta_pairs("run");
    let mut art = Artifact::default();
    match cfg.model {
        Model::Quantum => {
            let run = run_point(cfg, p)?;
            let history = run.history.expect("quantum runs keep their history");
            let mut cur = Table::new(&["kick", "mean_p", "current", "energy"]);
            cur.meta_all(&meta);
            let mut dist = Table::new(&["kick", "n", "beta", "probability"]);
            dist.meta_all(&meta);
            for (t, (d, c)) in history.iter().zip(&run.current).enumerate() {
                cur.row(&[t.to_string(), num(d.mean()), num(*c), num(d.energy())]);
                for (n, prob) in d.iter() {
                    dist.row(&[t.to_string(), n.to_string(), num(d.beta()), num(prob)]);
                }
            }
            art.add("current.csv", cur.render());
            art.add("distribution.csv", dist.render());
        }
        Model::EpsClassical => {
            let run = run_point(cfg, p)?;
            let mut cur = Table::new(&[
                "kick", "current", "k_tilde", "eps", "n_points", "mode", "seed",
            ]);
            cur.meta_all(&meta);
            for (t, c) in run.current.iter().enumerate() {
                cur.row(&[
                    t.to_string(),
                    num(*c),
                    num(p.k_tilde()),
                    num(p.eps()),
                    cfg.n_points.to_string(),
                    cfg.mode.as_str().to_string(),
                    cfg.seed.to_string(),
                ]);
            }
            art.add("current.csv", cur.render());
        }
        Model::Pendulum => {
            let run = run_point(cfg, p)?;
            let mut cur = Table::new(&["kick", "x", "f_over_x", "current"]);
            cur.meta_all(&meta);
            for (t, c) in run.current.iter().enumerate() {
                let x = p.scaling_x_at(t);
                cur.row(&[
                    t.to_string(),
                    num(x),
                    num(f_over_x(x, cfg.n_theta)?),
                    num(*c),
                ]);
            }
            art.add("current.csv", cur.render());
        }
        Model::BetaSpread => {
            let spread = BetaSpreadParams::new(*p, cfg.delta_beta, cfg.n_beta)?;
            let formula = spread.formula_current();
            let ensemble = spread.ensemble_current()?;
            let mut cur = Table::new(&["kick", "current", "eps", "delta_beta", "source"]);
            cur.meta_all(&meta);
            for (source, series) in [("formula", &formula), ("ensemble", &ensemble)] {
                for (t, c) in series.iter().enumerate() {
                    cur.row(&[
                        t.to_string(),
                        num(*c),
                        num(p.eps()),
                        num(cfg.delta_beta),
                        source.to_string(),
                    ]);
                }
            }
            art.add("current.csv", cur.render());
        }
    }
    art.add("metadata.toml", cfg.metadata_record("run"));
    Ok(art)
}

/// Outcome of a sweep: the artifact and how many points failed.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub artifact: Artifact,
    pub points: usize,
    pub failures: usize,
}

/// Every grid point of `cfg.sweep`, run in parallel and written in axis
/// order: `sweep.csv` (long format), `failures.csv`, `heatmap.csv` for the
/// quantum model (final-kick distribution per point) and `metadata.toml`.
pub fn run_sweep(cfg: &RunConfig) -> Result<SweepOutcome> {
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config("sweep", "missing [sweep] section"))?;
    let results: Vec<Result<(RatchetParams, PointRun)>> = spec
        .values
        .par_iter()
        .map(|&v| {
            let params = cfg.params_at(spec.axis, v)?;
            run_point(cfg, &params).map(|r| (params, r))
        })
        .collect();

    let meta = cfg.meta_pairs("sweep");
    let mut sweep = Table::new(&["axis_value", "kick", "current", "scaled_current", "x"]);
    sweep.meta_all(&meta);
    let mut failures = Table::new(&["axis_value", "error"]);
    failures.meta_all(&meta);
    let mut heatmap = Table::new(&["axis_value", "n", "probability"]);
    heatmap.meta_all(&meta);

    let mut failed = 0;
    for (&v, res) in spec.values.iter().zip(results) {
        match res {
            Ok((params, run)) => {
                for (t, c) in run.current.iter().enumerate() {
                    sweep.row(&[
                        num(v),
                        t.to_string(),
                        num(*c),
                        num(scaled(&params, t, *c)),
                        num(params.scaling_x_at(t)),
                    ]);
                }
                if let Some(last) = run.history.as_ref().and_then(|h| h.last()) {
                    for (n, prob) in last.iter() {
                        heatmap.row(&[num(v), n.to_string(), num(prob)]);
                    }
                }
            }
            Err(e) => {
                failed += 1;
                // keep the CSV one-line-per-record
                let msg = e.to_string().replace([',', '\n'], ";");
                failures.row(&[num(v), msg]);
            }
        }
    }

    let mut art = Artifact::default();
    art.add("sweep.csv", sweep.render());
    art.add("failures.csv", failures.render());
    if cfg.model == Model::Quantum {
        art.add("heatmap.csv", heatmap.render());
    }
    art.add("metadata.toml", cfg.metadata_record("sweep"));
    Ok(SweepOutcome {
        artifact: art,
        points: spec.values.len(),
        failures: failed,
    })
}
