//! Finite quasi-momentum spread.
//!
//! Closed-form resonant current damped by a Gaussian spread `Δβ`, and a
//! Gauss-Hermite average of exact quantum runs over `β ~ Normal(β₀, Δβ)`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{RatchetError, Result};
use crate::params::RatchetParams;
use crate::quantum::{evolve, mean_current, DEFAULT_BASIS};

pub const DEFAULT_BETA_NODES: usize = 32;
pub const MIN_BETA_NODES: usize = 8;
/// Spreads at or above this are rejected; the Gaussian would wrap around
/// the Brillouin zone noticeably.
pub const MAX_DELTA_BETA: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSpreadParams {
    pub base: RatchetParams,
    pub delta_beta: f64,
    pub n_beta: usize,
}

impl BetaSpreadParams {
    pub fn new(base: RatchetParams, delta_beta: f64, n_beta: usize) -> Result<Self> {
        validate_spread(delta_beta, n_beta)?;
        Ok(BetaSpreadParams {
            base,
            delta_beta,
            n_beta,
        })
    }

    pub fn formula_current(&self) -> Vec<f64> {
        let p = &self.base;
        suppressed_resonant_current(
            p.phi_d(),
            p.l(),
            p.tau(),
            p.beta(),
            p.gamma(),
            self.delta_beta,
            p.kicks(),
        )
    }

    pub fn ensemble_current(&self) -> Result<Vec<f64>> {
        quantum_beta_average(&self.base, self.delta_beta, self.n_beta)
    }
}

fn validate_spread(delta_beta: f64, n_beta: usize) -> Result<()> {
    if !(0.0..MAX_DELTA_BETA).contains(&delta_beta) {
        return Err(RatchetError::invalid(
            "delta_beta",
            format!("spread must lie in [0, {MAX_DELTA_BETA}), got {delta_beta}"),
        ));
    }
    if n_beta < MIN_BETA_NODES {
        return Err(RatchetError::invalid(
            "n_beta",
            format!("need at least {MIN_BETA_NODES} quadrature nodes, got {n_beta}"),
        ));
    }
    Ok(())
}

/// Per-kick damping `exp[-2(π l Δβ s)²]`.
pub fn suppression_factor(l: u32, delta_beta: f64, kick: usize) -> f64 {
    let a = PI * f64::from(l) * delta_beta * kick as f64;
    (-2.0 * a * a).exp()
}

/// Partial sums of `(φ_d/2) Σ_{s=1}^{t} sin[(πl + τβ)s − γ] exp[−2(πlΔβs)²]`
/// for `t = 0..=kicks` (entry 0 is 0).
///
/// For `Δβ = 0` at `τ = 2π`, `β = 1/2` every term is `−sin γ`, which is the
/// resonant ramp `−(φ_d t/2) sin γ`.
pub fn suppressed_resonant_current(
    phi_d: f64,
    l: u32,
    tau: f64,
    beta: f64,
    gamma: f64,
    delta_beta: f64,
    kicks: usize,
) -> Vec<f64> {
    let phase = PI * f64::from(l) + tau * beta;
    let mut out = Vec::with_capacity(kicks + 1);
    let mut acc = 0.0;
    out.push(acc);
    for s in 1..=kicks {
        let sf = s as f64;
        acc += 0.5 * phi_d * (phase * sf - gamma).sin() * suppression_factor(l, delta_beta, s);
        out.push(acc);
    }
    out
}

/// Probabilists' Gauss-Hermite rule: nodes and weights for `E[f(Z)]`,
/// `Z ~ Normal(0, 1)`, with weights summing to 1.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let pim4 = PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let m = n.div_ceil(2);
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    // physicists' → probabilists': t = √2 x, weight / √π
    let nodes = x
        .iter()
        .rev()
        .map(|v| v * std::f64::consts::SQRT_2)
        .collect();
    let norm: f64 = w.iter().sum();
    let weights = w.iter().rev().map(|v| v / norm).collect();
    (nodes, weights)
}

/// Quantum current averaged over a Gaussian quasi-momentum distribution
/// centred on `params.beta()`; samples are wrapped into `[0, 1)`.
pub fn quantum_beta_average(
    params: &RatchetParams,
    delta_beta: f64,
    n_beta: usize,
) -> Result<Vec<f64>> {
    validate_spread(delta_beta, n_beta)?;
    if delta_beta == 0.0 {
        return Ok(mean_current(&evolve(params, DEFAULT_BASIS)?));
    }
    let (nodes, weights) = gauss_hermite(n_beta);
    let runs: Vec<Vec<f64>> = nodes
        .par_iter()
        .map(|z| {
            let mut beta = (params.beta() + delta_beta * z).rem_euclid(1.0);
            if beta >= 1.0 {
                beta = 0.0;
            }
            let p = params.with_beta(beta)?;
            Ok(mean_current(&evolve(&p, DEFAULT_BASIS)?))
        })
        .collect::<Result<_>>()?;
    let mut avg = vec![0.0; params.kicks() + 1];
    for (run, w) in runs.iter().zip(&weights) {
        for (a, v) in avg.iter_mut().zip(run) {
            *a += w * v;
        }
    }
    Ok(avg)
}
