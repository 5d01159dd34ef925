//! Pendulum approximation of the near-resonant dynamics and the universal
//! ratchet scaling function.
//!
//! In scaled variables `J' = J/√k̃`, `s = √k̃·t` the map becomes the flow of
//! `H' = J'²/2 + cos θ`:
//!
//! ```text
//! dθ/ds = J',   dJ'/ds = sin θ
//! ```
//!
//! The scaling function is `F(x) = (1/2π) ∫ sin θ₀ · J'(θ₀, J'₀ = 0, x) dθ₀`,
//! and the ratchet current follows `⟨p⟩ = -φ_d t sin γ · F(x)/x` with
//! `x = √(φ_d|eps|)·t`.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{RatchetError, Result};
use crate::numeric::{angle_grid, pairwise_sum};
use crate::params::RatchetParams;

/// Largest integration step in scaled time.
pub const MAX_STEP: f64 = 1e-3;
pub const MIN_THETA_NODES: usize = 64;
pub const DEFAULT_THETA_NODES: usize = 4096;

/// Grid of the shared scaling table.
pub const TABLE_X_MAX: f64 = 12.0;
pub const TABLE_DX: f64 = 0.01;

// PEFRL coefficients (Omelyan, Mryglod & Folk).
const XI: f64 = 0.178_617_895_844_809_1;
const LAMBDA: f64 = -0.212_341_831_062_605_4;
const CHI: f64 = -0.066_264_582_669_818_5;

/// Point of the unit pendulum with its energy `J'²/2 + cos θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumPoint {
    pub theta: f64,
    pub jp: f64,
    pub energy: f64,
}

impl PendulumPoint {
    pub fn new(theta: f64, jp: f64) -> Self {
        PendulumPoint {
            theta,
            jp,
            energy: pendulum_energy(theta, jp),
        }
    }
}

pub fn pendulum_energy(theta: f64, jp: f64) -> f64 {
    0.5 * jp * jp + theta.cos()
}

/// Step used for a flow of total length `x`: `min(1e-3, x/1000)`.
pub fn default_step(x: f64) -> f64 {
    MAX_STEP.min(x / 1000.0)
}

/// One fourth-order symplectic (PEFRL) step of length `h`.
#[inline]
fn pefrl_step(theta: &mut f64, jp: &mut f64, h: f64) {
    *theta += XI * h * *jp;
    *jp += 0.5 * (1.0 - 2.0 * LAMBDA) * h * theta.sin();
    *theta += CHI * h * *jp;
    *jp += LAMBDA * h * theta.sin();
    *theta += (1.0 - 2.0 * (CHI + XI)) * h * *jp;
    *jp += LAMBDA * h * theta.sin();
    *theta += CHI * h * *jp;
    *jp += 0.5 * (1.0 - 2.0 * LAMBDA) * h * theta.sin();
    *theta += XI * h * *jp;
}

/// Integrate the pendulum from `s = 0` to `s = x` with fixed steps no
/// longer than `step` (the step is shortened so it divides `x`).
pub fn pendulum_flow(theta0: f64, jp0: f64, x: f64, step: f64) -> Result<PendulumPoint> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(RatchetError::invalid(
            "x",
            format!("must be finite and ≥ 0, got {x}"),
        ));
    }
    if !(step > 0.0) {
        return Err(RatchetError::invalid(
            "step",
            format!("must be positive, got {step}"),
        ));
    }
    let (mut theta, mut jp) = (theta0, jp0);
    if x > 0.0 {
        let n = (x / step).ceil().max(1.0) as usize;
        let h = x / n as f64;
        for _ in 0..n {
            pefrl_step(&mut theta, &mut jp, h);
        }
    }
    Ok(PendulumPoint::new(theta, jp))
}

/// `F(x)` by the periodic trapezoid rule on a half-offset grid of `n_theta`
/// initial angles.
pub fn scaling_f(x: f64, n_theta: usize) -> Result<f64> {
    if n_theta < MIN_THETA_NODES {
        return Err(RatchetError::invalid(
            "n_theta",
            format!("need at least {MIN_THETA_NODES} nodes, got {n_theta}"),
        ));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(RatchetError::invalid(
            "x",
            format!("must be finite and ≥ 0, got {x}"),
        ));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let step = default_step(x);
    let terms: Vec<f64> = angle_grid(n_theta)
        .into_par_iter()
        .map(|t0| {
            let end = pendulum_flow(t0, 0.0, x, step).expect("validated above");
            t0.sin() * end.jp
        })
        .collect();
    Ok(pairwise_sum(&terms) / n_theta as f64)
}

/// `F(x)/x`, continued to 1/2 at `x = 0`.
pub fn scaled_current(x: f64, n_theta: usize) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.5);
    }
    Ok(scaling_f(x, n_theta)? / x)
}

/// Tabulated universal curve `F(x)/x` on a uniform grid starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCurve {
    dx: f64,
    step: f64,
    n_theta: usize,
    f: Vec<f64>,
}

impl ScalingCurve {
    /// Tabulate on `0, dx, 2dx, …, x_max`. Each initial angle is integrated
    /// once across the whole grid.
    pub fn compute(x_max: f64, dx: f64, n_theta: usize) -> Result<Self> {
        if !(dx > 0.0) || !(x_max >= dx) {
            return Err(RatchetError::invalid(
                "dx",
                format!("need 0 < dx ≤ x_max, got dx = {dx}, x_max = {x_max}"),
            ));
        }
        if n_theta < MIN_THETA_NODES {
            return Err(RatchetError::invalid(
                "n_theta",
                format!("need at least {MIN_THETA_NODES} nodes, got {n_theta}"),
            ));
        }
        let cells = (x_max / dx).round() as usize;
        let steps_per_cell = (dx / MAX_STEP).ceil().max(1.0) as usize;
        let h = dx / steps_per_cell as f64;

        const CHUNK: usize = 64;
        let grid = angle_grid(n_theta);
        let partials: Vec<Vec<f64>> = grid
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut sums = vec![0.0; cells + 1];
                for &t0 in chunk {
                    let (mut theta, mut jp) = (t0, 0.0);
                    let weight = t0.sin();
                    for sum in sums.iter_mut().skip(1) {
                        for _ in 0..steps_per_cell {
                            pefrl_step(&mut theta, &mut jp, h);
                        }
                        *sum += weight * jp;
                    }
                }
                sums
            })
            .collect();
        let mut f = vec![0.0; cells + 1];
        for part in &partials {
            for (acc, v) in f.iter_mut().zip(part) {
                *acc += v;
            }
        }
        for v in &mut f {
            *v /= n_theta as f64;
        }
        Ok(ScalingCurve {
            dx,
            step: h,
            n_theta,
            f,
        })
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn x_max(&self) -> f64 {
        self.dx * (self.f.len() - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn x_values(&self) -> Vec<f64> {
        (0..self.f.len()).map(|i| i as f64 * self.dx).collect()
    }

    pub fn f_values(&self) -> &[f64] {
        &self.f
    }

    /// `F(x)/x` at the grid nodes.
    pub fn f_over_x_values(&self) -> Vec<f64> {
        (0..self.f.len())
            .map(|i| self.node_ratio(i as isize))
            .collect()
    }

    fn node_ratio(&self, i: isize) -> f64 {
        // F is odd in x, so F/x is even: mirror below zero
        let i = i.unsigned_abs();
        let last = self.f.len() - 1;
        if i == 0 {
            0.5
        } else if i <= last {
            self.f[i] / (i as f64 * self.dx)
        } else {
            // linear continuation past the end
            let a = self.f[last] / (last as f64 * self.dx);
            let b = self.f[last - 1] / ((last - 1) as f64 * self.dx);
            a + (a - b) * (i - last) as f64
        }
    }

    /// `F(x)/x` by cubic (Catmull-Rom) interpolation; `None` outside the table.
    pub fn f_over_x(&self, x: f64) -> Option<f64> {
        if !(x >= 0.0) || x > self.x_max() + 1e-12 {
            return None;
        }
        let u = x / self.dx;
        let i = (u.floor() as isize).min(self.f.len() as isize - 2);
        let t = u - i as f64;
        let p0 = self.node_ratio(i - 1);
        let p1 = self.node_ratio(i);
        let p2 = self.node_ratio(i + 1);
        let p3 = self.node_ratio(i + 2);
        let t2 = t * t;
        let t3 = t2 * t;
        Some(
            0.5 * (2.0 * p1
                + (p2 - p0) * t
                + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2
                + (3.0 * (p1 - p2) + p3 - p0) * t3),
        )
    }

    /// Grid node with the most negative `F(x)/x`, as `(x, F(x)/x)`.
    pub fn minimum(&self) -> (f64, f64) {
        self.f_over_x_values()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (i as f64 * self.dx, v))
            .fold((0.0, f64::INFINITY), |best, cur| {
                if cur.1 < best.1 {
                    cur
                } else {
                    best
                }
            })
    }

    /// First sign change of `F(x)/x` located by bisection on the interpolant.
    pub fn first_zero(&self) -> Option<f64> {
        let values = self.f_over_x_values();
        let i = values.windows(2).position(|w| w[0] > 0.0 && w[1] <= 0.0)?;
        let (mut lo, mut hi) = (i as f64 * self.dx, (i + 1) as f64 * self.dx);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.f_over_x(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// Cache file: `#`-prefixed metadata lines, then `x,F,F_over_x` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# scaling-cache\n");
        out.push_str(&format!("# x_max={}\n", self.x_max()));
        out.push_str(&format!("# dx={}\n", self.dx));
        out.push_str(&format!("# step={}\n", self.step));
        out.push_str(&format!("# n_theta={}\n", self.n_theta));
        out.push_str("x,F,F_over_x\n");
        for (i, (f, r)) in self.f.iter().zip(self.f_over_x_values()).enumerate() {
            out.push_str(&format!("{},{},{}\n", i as f64 * self.dx, f, r));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |msg: String| RatchetError::invalid("scaling_cache", msg);
        let mut dx = None;
        let mut step = None;
        let mut n_theta = None;
        let mut f = Vec::new();
        let mut saw_header = false;
        for line in text.lines() {
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((k, v)) = meta.trim().split_once('=') {
                    match k {
                        "dx" => dx = v.parse::<f64>().ok(),
                        "step" => step = v.parse::<f64>().ok(),
                        "n_theta" => n_theta = v.parse::<usize>().ok(),
                        _ => {}
                    }
                }
                continue;
            }
            if !saw_header {
                if line.trim() != "x,F,F_over_x" {
                    return Err(bad(format!("unexpected column header `{line}`")));
                }
                saw_header = true;
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(bad(format!("malformed row `{line}`")));
            }
            let value = cols[1]
                .parse::<f64>()
                .map_err(|e| bad(format!("bad F value `{}`: {e}", cols[1])))?;
            f.push(value);
        }
        let dx = dx.ok_or_else(|| bad("missing `dx` metadata".into()))?;
        let step = step.ok_or_else(|| bad("missing `step` metadata".into()))?;
        let n_theta = n_theta.ok_or_else(|| bad("missing `n_theta` metadata".into()))?;
        if f.len() < 4 {
            return Err(bad(format!("need at least 4 rows, got {}", f.len())));
        }
        Ok(ScalingCurve {
            dx,
            step,
            n_theta,
            f,
        })
    }
}

/// Shared table on `[0, 12]` with spacing 0.01 and 4096 angle nodes,
/// built on first use.
pub fn default_scaling_table() -> &'static ScalingCurve {
    static TABLE: OnceLock<ScalingCurve> = OnceLock::new();
    TABLE.get_or_init(|| {
        ScalingCurve::compute(TABLE_X_MAX, TABLE_DX, DEFAULT_THETA_NODES)
            .expect("default table parameters are valid")
    })
}

/// `F(x)/x` from the shared table, falling back to direct quadrature past its end.
pub fn universal_curve(x: f64) -> Result<f64> {
    match default_scaling_table().f_over_x(x) {
        Some(v) => Ok(v),
        None => scaled_current(x, DEFAULT_THETA_NODES),
    }
}

/// Predicted current `⟨p⟩ = -φ_d t sin γ · F(x)/x` after `params.kicks()` kicks.
pub fn predicted_current(params: &RatchetParams) -> Result<f64> {
    if params.eps() == 0.0 {
        return Err(RatchetError::Resonance { eps: 0.0 });
    }
    if params.kicks() == 0 {
        return Err(RatchetError::invalid(
            "kicks",
            "prediction needs at least one kick",
        ));
    }
    predicted_current_at(params, params.kicks())
}

/// Predicted current history for kicks `0..=params.kicks()`.
pub fn predicted_current_series(params: &RatchetParams) -> Result<Vec<f64>> {
    if params.eps() == 0.0 {
        return Err(RatchetError::Resonance { eps: 0.0 });
    }
    (0..=params.kicks())
        .map(|t| predicted_current_at(params, t))
        .collect()
}

fn predicted_current_at(params: &RatchetParams, kick: usize) -> Result<f64> {
    if kick == 0 {
        return Ok(0.0);
    }
    let ratio = universal_curve(params.scaling_x_at(kick))?;
    Ok(params.current_scale_at(kick) * ratio)
}
