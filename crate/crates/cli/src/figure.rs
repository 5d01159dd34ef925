//! Canned data bundles for the ratchet figures.
//!
//! Each bundle is a directory of CSVs plus `manifest.csv`, which lists every
//! member with its column names and row count. Theory overlays (`F(x)/x`,
//! resonant line, quasi-momentum-spread formula) are computed here, at
//! emission time, and stored next to the simulation columns.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};
use std::str::FromStr;

use ratchet_core::beta_spread::suppressed_resonant_current;
use ratchet_core::eps_classical::{ensemble_current, EnsembleMode, DEFAULT_POINTS};
use ratchet_core::params::{eps_from_offset, DEFAULT_HALF_TALBOT_US, RESONANT_BETA};
use ratchet_core::pendulum::{default_scaling_table, DEFAULT_THETA_NODES};
use ratchet_core::quantum::{evolve, mean_current, DEFAULT_BASIS};
use ratchet_core::RatchetParams;
use rayon::prelude::*;

use crate::config::linear_grid;
use crate::error::{CliError, Result};
use crate::run::{scaled, Artifact};
use crate::table::{num, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig1a,
    Fig1b,
    Fig2a,
    Fig2b,
    Fig3,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [
        FigureId::Fig1a,
        FigureId::Fig1b,
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureId::Fig1a => "fig1a",
            FigureId::Fig1b => "fig1b",
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3 => "fig3",
        }
    }
}

impl FromStr for FigureId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| {
                CliError::config(
                    "figure",
                    format!("unknown figure `{s}`; expected fig1a, fig1b, fig2a, fig2b or fig3"),
                )
            })
    }
}

/// Kick-number scans shown against the universal curve: `(φ_d, |ε|, γ)`.
pub const FIG2A_SERIES: [(f64, f64, f64); 10] = [
    (2.6, 0.01, -FRAC_PI_2),
    (2.6, 0.05, -FRAC_PI_3),
    (2.6, 0.10, -FRAC_PI_2),
    (2.6, 0.15, -FRAC_PI_3),
    (2.6, 0.20, -FRAC_PI_2),
    (3.0, 0.02, -FRAC_PI_3),
    (3.0, 0.08, -FRAC_PI_2),
    (3.0, 0.12, -FRAC_PI_2),
    (3.0, 0.15, -FRAC_PI_3),
    (3.0, 0.20, -FRAC_PI_3),
];

/// Kick scans stop once `x` passes this.
pub const FIG2A_X_MAX: f64 = 8.0;
pub const FIG3_EPS: [f64; 5] = [0.006, 0.04, 0.07, 0.09, 0.19];
pub const FIG3_KICKS: usize = 80;
pub const FIG3_DELTA_BETA: f64 = 0.02;

struct Bundle {
    figure: FigureId,
    members: Vec<(String, Table)>,
}

impl Bundle {
    fn new(figure: FigureId) -> Self {
        Bundle {
            figure,
            members: Vec::new(),
        }
    }

    fn add(&mut self, name: &str, mut table: Table) {
        table
            .meta("figure", self.figure.as_str())
            .meta("member", name);
        self.members.push((name.to_string(), table));
    }

    fn finish(self) -> Artifact {
        let mut manifest = Table::new(&["member", "columns", "rows"]);
        manifest
            .meta("figure", self.figure.as_str())
            .meta("basis", DEFAULT_BASIS)
            .meta("n_theta", DEFAULT_THETA_NODES);
        let mut art = Artifact::default();
        for (name, table) in &self.members {
            manifest.row(&[
                name.clone(),
                table.columns().join(" "),
                table.len().to_string(),
            ]);
        }
        art.add("manifest.csv", manifest.render());
        for (name, table) in self.members {
            art.add(&name, table.render());
        }
        art
    }
}

fn params(phi_d: f64, eps: f64, gamma: f64, kicks: usize) -> Result<RatchetParams> {
    Ok(RatchetParams::new(
        phi_d,
        1,
        eps,
        RESONANT_BETA,
        gamma,
        kicks,
    )?)
}

/// Tabulated `F(x)/x`; NaN past the table end, where direct quadrature would
/// dominate the bundle's run time.
fn universal_curve(x: f64) -> Result<f64> {
    Ok(default_scaling_table().f_over_x(x).unwrap_or(f64::NAN))
}

fn quantum(p: &RatchetParams) -> Result<Vec<f64>> {
    Ok(mean_current(&evolve(p, DEFAULT_BASIS)?))
}

/// Universal curve on `[0, 12]` every 0.05, shared by the fig2 bundles.
fn universal_table() -> Result<Table> {
    let mut t = Table::new(&["x", "f_over_x"]);
    for x in linear_grid(0.0, 12.0, 0.05)? {
        t.row(&[num(x), num(universal_curve(x)?)]);
    }
    Ok(t)
}

pub fn reproduce_figure(figure: FigureId) -> Result<Artifact> {
    let mut b = Bundle::new(figure);
    match figure {
        FigureId::Fig1a => fig1a(&mut b)?,
        FigureId::Fig1b => fig1b(&mut b)?,
        FigureId::Fig2a => fig2a(&mut b)?,
        FigureId::Fig2b => fig2b(&mut b)?,
        FigureId::Fig3 => fig3(&mut b)?,
    }
    Ok(b.finish())
}

/// Momentum distributions after 10 kicks across pulse-period offsets.
fn fig1a(b: &mut Bundle) -> Result<()> {
    let (phi_d, gamma, kicks) = (2.6, -FRAC_PI_2, 10);
    let offsets = linear_grid(-3.0, 3.0, 0.1)?;
    let runs: Vec<_> = offsets
        .par_iter()
        .map(|&off| {
            let eps = eps_from_offset(off, 1, DEFAULT_HALF_TALBOT_US)?;
            let p = params(phi_d, eps, gamma, kicks)?;
            let history = evolve(&p, DEFAULT_BASIS)?;
            Ok((p, history))
        })
        .collect::<Result<_>>()?;

    let mut heat = Table::new(&["offset_us", "eps", "n", "probability"]);
    let mut cur = Table::new(&[
        "offset_us",
        "eps",
        "x",
        "current",
        "scaled_current",
        "f_over_x",
        "resonant_line",
    ]);
    for t in [&mut heat, &mut cur] {
        t.meta("phi_d", num(phi_d))
            .meta("gamma", num(gamma))
            .meta("kicks", kicks)
            .meta("half_talbot_us", num(DEFAULT_HALF_TALBOT_US));
    }
    for (&off, (p, history)) in offsets.iter().zip(&runs) {
        let last = history.last().expect("history has kicks + 1 entries");
        for (n, prob) in last.iter() {
            heat.row(&[num(off), num(p.eps()), n.to_string(), num(prob)]);
        }
        let c = last.mean() - history[0].mean();
        let x = p.scaling_x();
        cur.row(&[
            num(off),
            num(p.eps()),
            num(x),
            num(c),
            num(scaled(p, kicks, c)),
            num(universal_curve(x)?),
            num(0.5 * p.current_scale_at(kicks)),
        ]);
    }
    b.add("heatmap.csv", heat);
    b.add("current.csv", cur);
    Ok(())
}

/// Current against kick number on both sides of resonance.
fn fig1b(b: &mut Bundle) -> Result<()> {
    let (phi_d, gamma, kicks) = (1.8, -FRAC_PI_2, 16);
    let mut t = Table::new(&[
        "eps",
        "kick",
        "x",
        "current",
        "scaled_current",
        "eps_classical",
        "predicted",
        "resonant_line",
    ]);
    t.meta("phi_d", num(phi_d)).meta("gamma", num(gamma));
    for eps in [-0.18, 0.18] {
        let p = params(phi_d, eps, gamma, kicks)?;
        let q = quantum(&p)?;
        let cl = ensemble_current(&p, DEFAULT_POINTS, EnsembleMode::Deterministic, 0)?;
        for k in 0..=kicks {
            let x = p.scaling_x_at(k);
            let predicted = if k == 0 {
                0.0
            } else {
                p.current_scale_at(k) * universal_curve(x)?
            };
            t.row(&[
                num(eps),
                k.to_string(),
                num(x),
                num(q[k]),
                num(scaled(&p, k, q[k])),
                num(cl[k]),
                num(predicted),
                num(0.5 * p.current_scale_at(k)),
            ]);
        }
    }
    b.add("curves.csv", t);
    Ok(())
}

/// Scaled current from kick-number scans, with the universal curve.
fn fig2a(b: &mut Bundle) -> Result<()> {
    let runs: Vec<_> = FIG2A_SERIES
        .par_iter()
        .map(|&(phi_d, eps, gamma)| {
            let kicks = (FIG2A_X_MAX / (phi_d * eps).sqrt()).floor() as usize;
            let p = params(phi_d, eps, gamma, kicks)?;
            Ok((p, quantum(&p)?))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&[
        "series",
        "phi_d",
        "eps",
        "gamma",
        "kick",
        "x",
        "current",
        "scaled_current",
        "f_over_x",
    ]);
    for (i, (p, q)) in runs.iter().enumerate() {
        for k in 1..=p.kicks() {
            let x = p.scaling_x_at(k);
            t.row(&[
                i.to_string(),
                num(p.phi_d()),
                num(p.eps()),
                num(p.gamma()),
                k.to_string(),
                num(x),
                num(q[k]),
                num(scaled(p, k, q[k])),
                num(universal_curve(x)?),
            ]);
        }
    }
    b.add("scans.csv", t);
    b.add("universal.csv", universal_table()?);
    Ok(())
}

/// Scaled current from detuning and kick-strength scans at fixed kick number.
fn fig2b(b: &mut Bundle) -> Result<()> {
    let gamma = -FRAC_PI_2;
    let eps_grid = linear_grid(0.01, 0.2, 0.01)?;
    let mut points: Vec<(&str, f64, f64, usize)> = Vec::new();
    for &e in &eps_grid {
        points.push(("eps_t10_phi2.6", 2.6, e, 10));
    }
    for &e in &eps_grid {
        points.push(("eps_t8_phi3", 3.0, e, 8));
    }
    for phi in linear_grid(1.0, 5.5, 0.25)? {
        points.push(("phi_t8_eps0.18", phi, 0.18, 8));
    }
    let runs: Vec<_> = points
        .par_iter()
        .map(|&(_, phi_d, eps, kicks)| {
            let p = params(phi_d, eps, gamma, kicks)?;
            Ok((p, quantum(&p)?))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&[
        "series",
        "phi_d",
        "eps",
        "kicks",
        "x",
        "current",
        "scaled_current",
        "f_over_x",
    ]);
    t.meta("gamma", num(gamma));
    for ((series, ..), (p, q)) in points.iter().zip(&runs) {
        let k = p.kicks();
        let x = p.scaling_x();
        t.row(&[
            series.to_string(),
            num(p.phi_d()),
            num(p.eps()),
            k.to_string(),
            num(x),
            num(q[k]),
            num(scaled(p, k, q[k])),
            num(universal_curve(x)?),
        ]);
    }
    b.add("scans.csv", t);
    b.add("universal.csv", universal_table()?);
    Ok(())
}

/// Current against kick number for several detunings, with the resonant
/// line and the quasi-momentum-spread formula.
fn fig3(b: &mut Bundle) -> Result<()> {
    let (phi_d, gamma) = (1.3, -FRAC_PI_3);
    let runs: Vec<_> = FIG3_EPS
        .par_iter()
        .map(|&eps| {
            let p = params(phi_d, eps, gamma, FIG3_KICKS)?;
            Ok((p, quantum(&p)?))
        })
        .collect::<Result<_>>()?;
    let mut curves = Table::new(&["eps", "kick", "x", "current", "predicted"]);
    curves.meta("phi_d", num(phi_d)).meta("gamma", num(gamma));
    for (p, q) in &runs {
        for (k, c) in q.iter().enumerate() {
            let x = p.scaling_x_at(k);
            let predicted = if k == 0 {
                0.0
            } else {
                p.current_scale_at(k) * universal_curve(x)?
            };
            curves.row(&[num(p.eps()), k.to_string(), num(x), num(*c), num(predicted)]);
        }
    }
    let ramp =
        suppressed_resonant_current(phi_d, 1, 2.0 * PI, RESONANT_BETA, gamma, 0.0, FIG3_KICKS);
    let spread = suppressed_resonant_current(
        phi_d,
        1,
        2.0 * PI,
        RESONANT_BETA,
        gamma,
        FIG3_DELTA_BETA,
        FIG3_KICKS,
    );
    let mut overlay = Table::new(&["kick", "resonant_line", "delta_beta_formula"]);
    overlay
        .meta("phi_d", num(phi_d))
        .meta("gamma", num(gamma))
        .meta("delta_beta", num(FIG3_DELTA_BETA));
    for k in 0..=FIG3_KICKS {
        overlay.row(&[k.to_string(), num(ramp[k]), num(spread[k])]);
    }
    b.add("curves.csv", curves);
    b.add("overlay.csv", overlay);
    Ok(())
}
