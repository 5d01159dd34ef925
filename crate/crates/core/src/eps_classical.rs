//! The epsilon-classical map on weighted ensembles.
//!
//! Near the resonance `tau = 2πl + eps` the kicked rotor behaves like the
//! classical map
//!
//! ```text
//! θ' = θ + J
//! J' = J + k̃ sin θ'          k̃ = |eps|·φ_d
//! ```
//!
//! with scaled momentum `J = eps·p + lπ + tau·β`. Momentum changes are
//! recovered as `Δp = ΔJ / eps`. For `eps < 0` the angle origin is shifted by
//! π so that the same map (with `k̃ ≥ 0`) applies on both sides of resonance.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{RatchetError, Result};
use crate::numeric::{angle_grid, pairwise_sum};
use crate::params::{canonical_angle, initial_density, RatchetParams};

/// Smallest `|eps|` accepted by the map.
pub const RESONANCE_CUTOFF: f64 = 1e-6;
pub const MIN_POINTS: usize = 16;
pub const DEFAULT_POINTS: usize = 8192;

/// A phase-space point. Both coordinates are unwrapped during evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsCoords {
    pub theta: f64,
    pub j: f64,
}

impl EpsCoords {
    pub fn new(theta: f64, j: f64) -> Self {
        EpsCoords { theta, j }
    }

    /// Angle wrapped into `[-π, π)` for readout.
    pub fn canonical_theta(&self) -> f64 {
        canonical_angle(self.theta)
    }
}

/// One iteration of the map: drift first, then kick at the new angle.
#[inline]
pub fn map_step(point: EpsCoords, k_tilde: f64) -> EpsCoords {
    let theta = point.theta + point.j;
    EpsCoords {
        theta,
        j: point.j + k_tilde * theta.sin(),
    }
}

/// How ensemble angles are drawn from the initial density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnsembleMode {
    /// Uniform midpoint grid weighted by the density.
    Deterministic,
    /// Inverse-CDF samples from the density with equal weights.
    Sampled,
}

impl EnsembleMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            EnsembleMode::Deterministic => "deterministic",
            EnsembleMode::Sampled => "sampled",
        }
    }
}

impl std::str::FromStr for EnsembleMode {
    type Err = RatchetError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deterministic" => Ok(EnsembleMode::Deterministic),
            "sampled" => Ok(EnsembleMode::Sampled),
            other => Err(RatchetError::invalid(
                "mode",
                format!("expected `deterministic` or `sampled`, got `{other}`"),
            )),
        }
    }
}

/// Weighted phase-space ensemble evolving under the map.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsEnsemble {
    points: Vec<EpsCoords>,
    weights: Vec<f64>,
    k_tilde: f64,
}

impl EpsEnsemble {
    pub fn points(&self) -> &[EpsCoords] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn k_tilde(&self) -> f64 {
        self.k_tilde
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Weighted mean of `f` over the ensemble.
    pub fn weighted_mean(&self, f: impl Fn(&EpsCoords) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .collect();
        pairwise_sum(&terms)
    }

    pub fn mean_j(&self) -> f64 {
        self.weighted_mean(|p| p.j)
    }

    /// Shift every angle by `delta`.
    pub fn shift_theta(&mut self, delta: f64) {
        for p in &mut self.points {
            p.theta += delta;
        }
    }

    pub fn step(&mut self) {
        let k = self.k_tilde;
        self.points
            .par_iter_mut()
            .with_min_len(1024)
            .for_each(|p| *p = map_step(*p, k));
    }
}

/// Cumulative distribution of the initial density on `[-π, π)`.
fn initial_cdf(theta: f64, gamma: f64) -> f64 {
    (theta + PI + (theta + gamma).sin() + gamma.sin()) / TAU
}

fn inverse_cdf(u: f64, gamma: f64) -> f64 {
    let (mut lo, mut hi) = (-PI, PI);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if initial_cdf(mid, gamma) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Ensemble representing `P(θ) = (1/2π)[1 + cos(θ + γ)]` with `J = 0`.
pub fn build_ensemble(
    gamma: f64,
    n_points: usize,
    k_tilde: f64,
    mode: EnsembleMode,
    seed: u64,
) -> Result<EpsEnsemble> {
    if n_points < MIN_POINTS {
        return Err(RatchetError::invalid(
            "n_points",
            format!("ensemble needs at least {MIN_POINTS} points, got {n_points}"),
        ));
    }
    if !k_tilde.is_finite() || k_tilde < 0.0 {
        return Err(RatchetError::invalid(
            "k_tilde",
            format!("scaled kick strength must be finite and ≥ 0, got {k_tilde}"),
        ));
    }
    let (thetas, weights) = match mode {
        EnsembleMode::Deterministic => {
            let thetas = angle_grid(n_points);
            let raw: Vec<f64> = thetas.iter().map(|&t| initial_density(t, gamma)).collect();
            let total = pairwise_sum(&raw);
            let weights = raw.iter().map(|w| w / total).collect();
            (thetas, weights)
        }
        EnsembleMode::Sampled => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let thetas = (0..n_points)
                .map(|_| inverse_cdf(rng.gen::<f64>(), gamma))
                .collect();
            (thetas, vec![1.0 / n_points as f64; n_points])
        }
    };
    Ok(EpsEnsemble {
        points: thetas.into_iter().map(|t| EpsCoords::new(t, 0.0)).collect(),
        weights,
        k_tilde,
    })
}

/// Per-kick momentum current `⟨J_t - J_0⟩ / eps` (units of ħG), `kicks + 1`
/// entries starting with 0.
pub fn ensemble_current(
    params: &RatchetParams,
    n_points: usize,
    mode: EnsembleMode,
    seed: u64,
) -> Result<Vec<f64>> {
    let eps = params.eps();
    if eps.abs() < RESONANCE_CUTOFF {
        return Err(RatchetError::Resonance { eps });
    }
    let mut ensemble = build_ensemble(params.gamma(), n_points, params.k_tilde(), mode, seed)?;
    if eps < 0.0 {
        ensemble.shift_theta(PI);
    }
    let j0 = ensemble.mean_j();
    let mut current = Vec::with_capacity(params.kicks() + 1);
    current.push(0.0);
    for _ in 0..params.kicks() {
        ensemble.step();
        current.push((ensemble.mean_j() - j0) / eps);
    }
    Ok(current)
}
