//! Checks shared by the acceptance suite and the property tests.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use ratchet_core::eps_classical::{map_step, EpsCoords};
use ratchet_core::params::initial_density;
use ratchet_core::pendulum::{pendulum_energy, pendulum_flow};
use ratchet_core::quantum::QuantumState;

/// Tiny deterministic generator (SplitMix64) for fixed-seed test inputs.
pub struct SplitMix(u64);

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        SplitMix(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }
}

/// Random normalised state with support on `|n| ≤ width`.
pub fn random_state(rng: &mut SplitMix, basis: usize, width: usize, beta: f64) -> QuantumState {
    let mut amps = vec![Complex64::new(0.0, 0.0); 2 * basis + 1];
    for n in basis - width..=basis + width {
        amps[n] = Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    }
    let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in &mut amps {
        *c /= norm;
    }
    QuantumState::from_amplitudes(amps, beta).unwrap()
}

/// Largest `|‖ψ‖² − 1|` over 50 Floquet periods.
pub fn unitarity_drift(state: &QuantumState, phi_d: f64, tau: f64) -> f64 {
    let mut s = state.clone();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        s.free_evolve(tau);
        s.kick(phi_d).unwrap();
        worst = worst.max((s.norm_sqr() - 1.0).abs());
    }
    worst
}

/// Vector-norm distance between the FFT kick and the dense Bessel kick.
pub fn kick_route_gap(state: &QuantumState, phi_d: f64) -> f64 {
    let mut grid = state.clone();
    grid.kick(phi_d).unwrap();
    let mut dense = state.grown(grid.basis());
    dense.kick_dense(phi_d);
    grid.amplitudes()
        .iter()
        .zip(dense.amplitudes())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `|det J − 1|` of the map Jacobian by central differences.
pub fn jacobian_defect(p: EpsCoords, k: f64) -> f64 {
    let h = 1e-6;
    let f = |t: f64, j: f64| map_step(EpsCoords::new(t, j), k);
    let dt_p = f(p.theta + h, p.j);
    let dt_m = f(p.theta - h, p.j);
    let dj_p = f(p.theta, p.j + h);
    let dj_m = f(p.theta, p.j - h);
    let a = (dt_p.theta - dt_m.theta) / (2.0 * h);
    let b = (dj_p.theta - dj_m.theta) / (2.0 * h);
    let c = (dt_p.j - dt_m.j) / (2.0 * h);
    let d = (dj_p.j - dj_m.j) / (2.0 * h);
    (a * d - b * c - 1.0).abs()
}

/// Relative change of the area of a small parallelogram after one step.
pub fn area_defect(p: EpsCoords, k: f64) -> f64 {
    let h = 1e-5;
    let o = map_step(p, k);
    let u = map_step(EpsCoords::new(p.theta + h, p.j), k);
    let v = map_step(EpsCoords::new(p.theta, p.j + h), k);
    let area = (u.theta - o.theta) * (v.j - o.j) - (u.j - o.j) * (v.theta - o.theta);
    (area / (h * h) - 1.0).abs()
}

/// Largest energy deviation per unit scaled time along a pendulum trajectory
/// sampled every 0.25 up to `x`.
pub fn energy_drift_rate(theta0: f64, jp0: f64, x: f64, step: f64) -> f64 {
    let e0 = pendulum_energy(theta0, jp0);
    let mut worst: f64 = 0.0;
    let samples = (x / 0.25).ceil() as usize;
    let (mut th, mut j) = (theta0, jp0);
    for k in 1..=samples {
        let p = pendulum_flow(th, j, 0.25, step).unwrap();
        th = p.theta;
        j = p.jp;
        let s = k as f64 * 0.25;
        worst = worst.max((p.energy - e0).abs() / s.max(1.0));
    }
    worst
}

/// `(∫P cos θ − cos γ/2, ∫P sin θ + sin γ/2)` by periodic trapezoid.
pub fn density_moment_errors(gamma: f64) -> (f64, f64) {
    let n = 512;
    let h = TAU / n as f64;
    let (mut c, mut s) = (0.0, 0.0);
    for i in 0..n {
        let t = -PI + i as f64 * h;
        let p = initial_density(t, gamma);
        c += p * t.cos() * h;
        s += p * t.sin() * h;
    }
    ((c - 0.5 * gamma.cos()).abs(), (s + 0.5 * gamma.sin()).abs())
}

/// Prints one verdict line per acceptance criterion.
pub struct Criterion {
    id: &'static str,
    name: &'static str,
    budget: Duration,
    start: Instant,
}

impl Criterion {
    pub fn start(id: &'static str, name: &'static str, budget_secs: u64) -> Self {
        Criterion {
            id,
            name,
            budget: Duration::from_secs(budget_secs),
            start: Instant::now(),
        }
    }

    pub fn finish(self, pass: bool, detail: String) {
        let elapsed = self.start.elapsed();
        let in_time = elapsed <= self.budget;
        let verdict = if pass && in_time { "PASS" } else { "FAIL" };
        println!(
            "[{verdict}] {} {}: {detail} ({:.2} s, budget {} s)",
            self.id,
            self.name,
            elapsed.as_secs_f64(),
            self.budget.as_secs()
        );
        assert!(pass, "{} failed: {detail}", self.id);
        assert!(in_time, "{} exceeded its runtime budget", self.id);
    }
}
