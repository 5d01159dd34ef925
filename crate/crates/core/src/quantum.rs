//! Exact Floquet evolution of the kicked rotor at fixed quasi-momentum.
//!
//! A state is a vector of amplitudes `c_n` on the momentum ladder
//! `p = n + β`, `n ∈ [-N, N]`. The free flight is diagonal in momentum; the
//! kick `exp(-iφ_d cos θ)` is diagonal in angle and is applied on an FFT grid.
//!
//! One period is *free flight followed by a kick*. The initial state is the
//! state at the start of the first period, so the first kick acts on a state
//! that has already completed one free flight. Momentum observables after `t`
//! kicks do not depend on any trailing free flight.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::bessel::bessel_j_orders;
use crate::error::{RatchetError, Result};
use crate::params::RatchetParams;

pub const DEFAULT_BASIS: usize = 128;
pub const MAX_BASIS: usize = 2048;
pub const MIN_BASIS: usize = 8;

/// Number of outermost momentum components on each side that form the tail.
const TAIL_GUARD: usize = 8;

/// Largest tail mass tolerated after a kick before the basis is doubled.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Amplitudes over the momentum ladder `n ∈ [-N, N]` at fixed quasi-momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<Complex64>,
    beta: f64,
    basis: usize,
}

impl QuantumState {
    /// `(|0⟩ + e^{iγ}|1⟩)/√2` on a basis of half-width `basis`.
    pub fn initial(gamma: f64, beta: f64, basis: usize) -> Result<Self> {
        if basis < MIN_BASIS {
            return Err(RatchetError::invalid(
                "basis",
                format!("momentum basis half-width must be ≥ {MIN_BASIS}, got {basis}"),
            ));
        }
        if !(0.0..1.0).contains(&beta) {
            return Err(RatchetError::invalid(
                "beta",
                format!("must lie in [0, 1), got {beta}"),
            ));
        }
        let mut state = QuantumState::zeros(beta, basis);
        state.amplitudes[basis] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        state.amplitudes[basis + 1] = Complex64::from_polar(FRAC_1_SQRT_2, gamma);
        Ok(state)
    }

    /// Build a state from explicit amplitudes for `n = -N ..= N`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>, beta: f64) -> Result<Self> {
        if amplitudes.len() % 2 == 0 || amplitudes.len() < 2 * MIN_BASIS + 1 {
            return Err(RatchetError::invalid(
                "amplitudes",
                format!(
                    "expected an odd length ≥ {}, got {}",
                    2 * MIN_BASIS + 1,
                    amplitudes.len()
                ),
            ));
        }
        let basis = amplitudes.len() / 2;
        Ok(QuantumState {
            amplitudes,
            beta,
            basis,
        })
    }

    fn zeros(beta: f64, basis: usize) -> Self {
        QuantumState {
            amplitudes: vec![Complex64::new(0.0, 0.0); 2 * basis + 1],
            beta,
            basis,
        }
    }

    pub fn basis(&self) -> usize {
        self.basis
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude of `|n + β⟩`, zero outside the basis.
    pub fn amplitude(&self, n: i64) -> Complex64 {
        let idx = n + self.basis as i64;
        if idx < 0 || idx as usize >= self.amplitudes.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.amplitudes[idx as usize]
        }
    }

    fn momentum_indices(&self) -> impl Iterator<Item = i64> {
        let n = self.basis as i64;
        -n..=n
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Probability carried by the outermost components `|n| > N - 8`.
    pub fn tail_mass(&self) -> f64 {
        let guard = TAIL_GUARD.min(self.basis);
        let len = self.amplitudes.len();
        self.amplitudes[..guard]
            .iter()
            .chain(&self.amplitudes[len - guard..])
            .map(|c| c.norm_sqr())
            .sum()
    }

    /// Zero-pad to a larger basis.
    pub fn grown(&self, basis: usize) -> QuantumState {
        assert!(basis >= self.basis);
        let mut out = QuantumState::zeros(self.beta, basis);
        let shift = basis - self.basis;
        out.amplitudes[shift..shift + self.amplitudes.len()].copy_from_slice(&self.amplitudes);
        out
    }

    /// `|ψ(θ)|²` with `ψ(θ) = (2π)^{-1/2} Σ_n c_n e^{inθ}`.
    pub fn position_density(&self, theta: f64) -> f64 {
        let psi: Complex64 = self
            .momentum_indices()
            .zip(&self.amplitudes)
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(|(n, c)| c * Complex64::from_polar(1.0, n as f64 * theta))
            .sum();
        psi.norm_sqr() / TAU
    }

    /// Free flight for a scaled period `tau`.
    pub fn free_evolve(&mut self, tau: f64) {
        let l = (tau / TAU).round();
        let eps = tau - TAU * l;
        self.free_evolve_split(l as i64, eps);
    }

    /// Free flight for `tau = 2πl + eps`, multiplying `c_n` by
    /// `exp(-i tau (n+β)²/2)`.
    ///
    /// The `πl(n+β)²` part is reduced modulo 2π in exact integer arithmetic
    /// so resonant phases stay exact for large `|n|`.
    pub fn free_evolve_split(&mut self, l: i64, eps: f64) {
        let beta = self.beta;
        let basis = self.basis as i64;
        for (idx, c) in self.amplitudes.iter_mut().enumerate() {
            let n = idx as i64 - basis;
            let q = n as f64 + beta;
            // πl n² ≡ π (l n² mod 2)
            let parity = (l.rem_euclid(2) * n.rem_euclid(2)) as f64;
            // 2πl n β mod 2π
            let cross = (l as f64 * n as f64 * beta).rem_euclid(1.0);
            let resonant = PI * parity + TAU * cross + PI * l as f64 * beta * beta;
            let phase = resonant + 0.5 * eps * q * q;
            *c *= Complex64::from_polar(1.0, -phase);
        }
    }

    /// Apply `exp(-iφ_d cos θ)`, doubling the basis while the tail mass
    /// exceeds [`TAIL_TOLERANCE`].
    pub fn kick(&mut self, phi_d: f64) -> Result<()> {
        let mut op = KickOperator::new(phi_d, self.basis)?;
        self.kick_with(&mut op)
    }

    pub(crate) fn kick_with(&mut self, op: &mut KickOperator) -> Result<()> {
        if op.phi_d == 0.0 {
            return Ok(());
        }
        if op.basis != self.basis {
            *op = KickOperator::new(op.phi_d, self.basis)?;
        }
        let before = self.clone();
        loop {
            op.apply(self);
            let tail = self.tail_mass();
            if tail < TAIL_TOLERANCE {
                return Ok(());
            }
            let bigger = self.basis * 2;
            if bigger > MAX_BASIS {
                return Err(RatchetError::BasisOverflow {
                    basis: self.basis,
                    tail_mass: tail,
                });
            }
            *self = before.grown(bigger);
            *op = KickOperator::new(op.phi_d, bigger)?;
        }
    }

    /// Kick through the dense Bessel matrix
    /// `c_n ← Σ_m (-i)^{n-m} J_{n-m}(φ_d) c_m`, truncated at
    /// `|n - m| ≤ 3φ_d + 40`. No basis growth.
    pub fn kick_dense(&mut self, phi_d: f64) {
        let width = (3.0 * phi_d).ceil() as usize + 40;
        let js = bessel_j_orders(width, phi_d);
        // (-i)^k J_k for k = -width ..= width
        let coeff: Vec<Complex64> = (-(width as i64)..=width as i64)
            .map(|k| {
                let j = js[k.unsigned_abs() as usize];
                let j = if k < 0 && k % 2 != 0 { -j } else { j };
                minus_i_pow(k) * j
            })
            .collect();
        let len = self.amplitudes.len() as i64;
        let src = self.amplitudes.clone();
        for n in 0..len {
            let lo = (n - width as i64).max(0);
            let hi = (n + width as i64).min(len - 1);
            let mut acc = Complex64::new(0.0, 0.0);
            for m in lo..=hi {
                acc += coeff[(n - m + width as i64) as usize] * src[m as usize];
            }
            self.amplitudes[n as usize] = acc;
        }
    }

    pub fn distribution(&self) -> MomentumDistribution {
        MomentumDistribution {
            n_min: -(self.basis as i64),
            probabilities: self.amplitudes.iter().map(|c| c.norm_sqr()).collect(),
            beta: self.beta,
        }
    }
}

fn minus_i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Smallest power of two ≥ `4N + 4`.
pub fn kick_grid_size(basis: usize) -> usize {
    (4 * basis + 4).next_power_of_two()
}

/// Angle-grid kick `exp(-iφ_d cos θ)` with cached FFT plans.
pub struct KickOperator {
    phi_d: f64,
    basis: usize,
    phases: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    buffer: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl KickOperator {
    pub fn new(phi_d: f64, basis: usize) -> Result<Self> {
        if !phi_d.is_finite() || phi_d < 0.0 {
            return Err(RatchetError::invalid(
                "phi_d",
                format!("kick strength must be finite and ≥ 0, got {phi_d}"),
            ));
        }
        let grid = kick_grid_size(basis);
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid);
        let inverse = planner.plan_fft_inverse(grid);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        let phases = (0..grid)
            .map(|j| {
                let theta = TAU * j as f64 / grid as f64;
                Complex64::from_polar(1.0, -phi_d * theta.cos())
            })
            .collect();
        Ok(KickOperator {
            phi_d,
            basis,
            phases,
            forward,
            inverse,
            buffer: vec![Complex64::new(0.0, 0.0); grid],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        })
    }

    pub fn phi_d(&self) -> f64 {
        self.phi_d
    }

    fn apply(&mut self, state: &mut QuantumState) {
        let grid = self.buffer.len();
        let basis = state.basis as i64;
        self.buffer.fill(Complex64::new(0.0, 0.0));
        for (idx, c) in state.amplitudes.iter().enumerate() {
            let n = idx as i64 - basis;
            self.buffer[n.rem_euclid(grid as i64) as usize] = *c;
        }
        // ψ(θ_j) = Σ_n c_n e^{i n θ_j}
        self.inverse
            .process_with_scratch(&mut self.buffer, &mut self.scratch);
        for (v, k) in self.buffer.iter_mut().zip(&self.phases) {
            *v *= k;
        }
        self.forward
            .process_with_scratch(&mut self.buffer, &mut self.scratch);
        let scale = 1.0 / grid as f64;
        for (idx, c) in state.amplitudes.iter_mut().enumerate() {
            let n = idx as i64 - basis;
            *c = self.buffer[n.rem_euclid(grid as i64) as usize] * scale;
        }
    }
}

/// Probabilities over `n + β` with derived moments.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumDistribution {
    n_min: i64,
    probabilities: Vec<f64>,
    beta: f64,
}

impl MomentumDistribution {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_range(&self) -> std::ops::RangeInclusive<i64> {
        self.n_min..=self.n_min + self.probabilities.len() as i64 - 1
    }

    pub fn probability(&self, n: i64) -> f64 {
        let idx = n - self.n_min;
        if idx < 0 {
            return 0.0;
        }
        self.probabilities.get(idx as usize).copied().unwrap_or(0.0)
    }

    /// `(n, probability)` pairs in increasing `n`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.n_range().zip(self.probabilities.iter().copied())
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// `⟨p⟩ = Σ P(n)(n + β)` in units of ħG.
    pub fn mean(&self) -> f64 {
        self.iter().map(|(n, p)| p * (n as f64 + self.beta)).sum()
    }

    /// Kinetic energy `⟨p²⟩/2`.
    pub fn energy(&self) -> f64 {
        self.iter()
            .map(|(n, p)| {
                let q = n as f64 + self.beta;
                0.5 * p * q * q
            })
            .sum()
    }
}

/// Initial superposition state; see [`QuantumState::initial`].
pub fn make_initial_state(gamma: f64, beta: f64, basis: usize) -> Result<QuantumState> {
    QuantumState::initial(gamma, beta, basis)
}

pub fn free_evolution(mut state: QuantumState, tau: f64) -> QuantumState {
    state.free_evolve(tau);
    state
}

pub fn kick(mut state: QuantumState, phi_d: f64) -> Result<QuantumState> {
    state.kick(phi_d)?;
    Ok(state)
}

/// Run `params.kicks()` Floquet periods and return the momentum distribution
/// before the first period and after every kick (`kicks + 1` entries).
pub fn evolve(params: &RatchetParams, basis: usize) -> Result<Vec<MomentumDistribution>> {
    let mut state = QuantumState::initial(params.gamma(), params.beta(), basis)?;
    let mut op = KickOperator::new(params.phi_d(), basis)?;
    let mut history = Vec::with_capacity(params.kicks() + 1);
    history.push(state.distribution());
    for _ in 0..params.kicks() {
        state.free_evolve_split(i64::from(params.l()), params.eps());
        state.kick_with(&mut op)?;
        history.push(state.distribution());
    }
    Ok(history)
}

/// Ratchet current `⟨p⟩_t - ⟨p⟩_0` for every snapshot.
pub fn mean_current(history: &[MomentumDistribution]) -> Vec<f64> {
    let Some(first) = history.first() else {
        return Vec::new();
    };
    let p0 = first.mean();
    history
        .iter()
        .enumerate()
        .map(|(i, d)| if i == 0 { 0.0 } else { d.mean() - p0 })
        .collect()
}

/// Convenience: current history of a quantum run with the default basis.
pub fn quantum_current(params: &RatchetParams) -> Result<Vec<f64>> {
    Ok(mean_current(&evolve(params, DEFAULT_BASIS)?))
}
