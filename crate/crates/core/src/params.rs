//! Dimensionless parameter set, lab-unit conversions and the shared initial state.
//!
//! Momentum is measured in units of ħG (two photon recoils), position in units
//! of 1/G, and time in units of the pulse period. The scaled pulse period is
//! `tau = 2π·l + eps`, with `l` the order of the nearby quantum resonance and
//! `eps` the detuning from it.

use std::f64::consts::{PI, TAU};

use crate::error::{RatchetError, Result};

/// Half-Talbot time of the reference apparatus, in μs.
pub const DEFAULT_HALF_TALBOT_US: f64 = 51.5;

/// Quasi-momentum that makes `l = 1` resonant for the two-state superposition.
pub const RESONANT_BETA: f64 = 0.5;

/// Wrap an angle into `[-π, π)`.
pub fn canonical_angle(theta: f64) -> f64 {
    let wrapped = (theta + PI).rem_euclid(TAU) - PI;
    // rem_euclid can return TAU itself for tiny negative inputs
    if wrapped >= PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

/// Full dimensionless parameter set of a kicked-rotor ratchet run.
///
/// `tau` is never stored; it is always derived from `(l, eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatchetParams {
    phi_d: f64,
    l: u32,
    eps: f64,
    beta: f64,
    gamma: f64,
    kicks: usize,
}

impl Default for RatchetParams {
    fn default() -> Self {
        RatchetParams {
            phi_d: 1.0,
            l: 1,
            eps: 0.0,
            beta: RESONANT_BETA,
            gamma: -PI / 2.0,
            kicks: 10,
        }
    }
}

impl RatchetParams {
    pub fn new(phi_d: f64, l: u32, eps: f64, beta: f64, gamma: f64, kicks: usize) -> Result<Self> {
        let params = RatchetParams {
            phi_d,
            l,
            eps,
            beta,
            gamma,
            kicks,
        };
        params.validate()?;
        Ok(params)
    }

    /// Recover `(l, eps)` from a scaled pulse period, taking `l` as the
    /// nearest resonance order.
    pub fn from_tau(phi_d: f64, tau: f64, beta: f64, gamma: f64, kicks: usize) -> Result<Self> {
        if !tau.is_finite() || tau < PI {
            return Err(RatchetError::invalid(
                "tau",
                format!("{tau} is not near any resonance 2πl with l ≥ 1"),
            ));
        }
        let l = (tau / TAU).round() as u32;
        let eps = tau - TAU * f64::from(l);
        Self::new(phi_d, l, eps, beta, gamma, kicks)
    }

    fn validate(&self) -> Result<()> {
        if !self.phi_d.is_finite() || self.phi_d < 0.0 {
            return Err(RatchetError::invalid(
                "phi_d",
                format!("kick strength must be finite and ≥ 0, got {}", self.phi_d),
            ));
        }
        if self.l == 0 {
            return Err(RatchetError::invalid("l", "resonance order must be ≥ 1"));
        }
        if !self.eps.is_finite() {
            return Err(RatchetError::invalid("eps", "detuning must be finite"));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(RatchetError::invalid(
                "beta",
                format!("quasi-momentum must lie in [0, 1), got {}", self.beta),
            ));
        }
        if !self.gamma.is_finite() {
            return Err(RatchetError::invalid("gamma", "phase must be finite"));
        }
        Ok(())
    }

    pub fn phi_d(&self) -> f64 {
        self.phi_d
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn tau(&self) -> f64 {
        TAU * f64::from(self.l) + self.eps
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn kicks(&self) -> usize {
        self.kicks
    }

    /// Scaled kick strength of the epsilon-classical map, `|eps|·phi_d`.
    pub fn k_tilde(&self) -> f64 {
        self.eps.abs() * self.phi_d
    }

    /// Scaling variable `x = sqrt(phi_d·|eps|)·t` after `kick` kicks.
    pub fn scaling_x_at(&self, kick: usize) -> f64 {
        self.k_tilde().sqrt() * kick as f64
    }

    /// Scaling variable at the final kick.
    pub fn scaling_x(&self) -> f64 {
        self.scaling_x_at(self.kicks)
    }

    /// Normalisation of the scaled current, `-phi_d·t·sin(gamma)`.
    pub fn current_scale_at(&self, kick: usize) -> f64 {
        -self.phi_d * kick as f64 * self.gamma.sin()
    }

    pub fn with_phi_d(self, phi_d: f64) -> Result<Self> {
        Self::new(phi_d, self.l, self.eps, self.beta, self.gamma, self.kicks)
    }

    pub fn with_l(self, l: u32) -> Result<Self> {
        Self::new(self.phi_d, l, self.eps, self.beta, self.gamma, self.kicks)
    }

    pub fn with_eps(self, eps: f64) -> Result<Self> {
        Self::new(self.phi_d, self.l, eps, self.beta, self.gamma, self.kicks)
    }

    pub fn with_beta(self, beta: f64) -> Result<Self> {
        Self::new(self.phi_d, self.l, self.eps, beta, self.gamma, self.kicks)
    }

    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        Self::new(self.phi_d, self.l, self.eps, self.beta, gamma, self.kicks)
    }

    pub fn with_kicks(self, kicks: usize) -> Result<Self> {
        Self::new(self.phi_d, self.l, self.eps, self.beta, self.gamma, kicks)
    }
}

/// Detuning `eps` for a pulse period offset (μs) from `l` half-Talbot times.
pub fn eps_from_offset(offset_us: f64, l: u32, half_talbot_us: f64) -> Result<f64> {
    if !(half_talbot_us > 0.0) || !half_talbot_us.is_finite() {
        return Err(RatchetError::invalid(
            "half_talbot_us",
            format!("half-Talbot time must be positive, got {half_talbot_us}"),
        ));
    }
    if l == 0 {
        return Err(RatchetError::invalid("l", "resonance order must be ≥ 1"));
    }
    if !offset_us.is_finite() {
        return Err(RatchetError::invalid("offset_us", "offset must be finite"));
    }
    Ok(TAU * offset_us / half_talbot_us)
}

/// Kick strength `Ω²Δt / (8 δ_L)` from the Rabi frequency, pulse length and detuning.
pub fn kick_strength_from_laser(rabi: f64, pulse_length: f64, detuning: f64) -> Result<f64> {
    if detuning == 0.0 || !detuning.is_finite() {
        return Err(RatchetError::invalid(
            "detuning",
            "laser detuning must be finite and non-zero",
        ));
    }
    if !(pulse_length > 0.0) || !pulse_length.is_finite() {
        return Err(RatchetError::invalid(
            "pulse_length",
            format!("pulse length must be positive, got {pulse_length}"),
        ));
    }
    if !rabi.is_finite() {
        return Err(RatchetError::invalid("rabi_frequency", "must be finite"));
    }
    Ok(rabi * rabi * pulse_length / (8.0 * detuning))
}

/// Laboratory description of a kicking sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabUnits {
    /// μs
    pub half_talbot_time: f64,
    /// μs
    pub pulse_period: f64,
    /// rad/s
    pub rabi_frequency: f64,
    /// s
    pub pulse_length: f64,
    /// rad/s
    pub detuning: f64,
}

impl LabUnits {
    /// Detuning from the `l`-th resonance.
    pub fn eps(&self, l: u32) -> Result<f64> {
        let offset = self.pulse_period - f64::from(l) * self.half_talbot_time;
        eps_from_offset(offset, l, self.half_talbot_time)
    }

    pub fn phi_d(&self) -> Result<f64> {
        kick_strength_from_laser(self.rabi_frequency, self.pulse_length, self.detuning)
    }

    /// Dimensionless parameters for this lab configuration.
    pub fn to_params(&self, l: u32, beta: f64, gamma: f64, kicks: usize) -> Result<RatchetParams> {
        RatchetParams::new(self.phi_d()?, l, self.eps(l)?, beta, gamma, kicks)
    }
}

/// Position density of the initial superposition, `(1/2π)[1 + cos(θ + γ)]`.
pub fn initial_density(theta: f64, gamma: f64) -> f64 {
    (1.0 + (theta + gamma).cos()) / TAU
}

/// The two-component initial state `(|0⟩ + e^{iγ}|1⟩)/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub gamma: f64,
}

impl InitialState {
    pub fn new(gamma: f64) -> Self {
        InitialState { gamma }
    }

    pub fn density(&self, theta: f64) -> f64 {
        initial_density(theta, self.gamma)
    }

    /// Momentum-basis amplitudes as `(n, re, im)` triples.
    pub fn components(&self) -> [(i64, f64, f64); 2] {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        [(0, a, 0.0), (1, a * self.gamma.cos(), a * self.gamma.sin())]
    }
}
