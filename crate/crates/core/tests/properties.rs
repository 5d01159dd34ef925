mod support;

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use ratchet_core::eps_classical::{ensemble_current, map_step, EnsembleMode, EpsCoords};
use ratchet_core::params::{initial_density, RatchetParams};
use ratchet_core::pendulum::{default_step, scaling_f};
use ratchet_core::quantum::{evolve, mean_current, quantum_current};
use support::*;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 24,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn floquet_step_is_unitary(seed in any::<u64>(), phi in 0.0f64..5.0, tau in 0.1f64..13.0, beta in 0.0f64..1.0) {
        let mut rng = SplitMix::new(seed);
        let state = random_state(&mut rng, 64, 12, beta);
        prop_assert!(unitarity_drift(&state, phi, tau) < 1e-10);
    }

    #[test]
    fn fft_and_bessel_kicks_agree(seed in any::<u64>(), phi in 0.0f64..6.0) {
        let mut rng = SplitMix::new(seed);
        let state = random_state(&mut rng, 64, 10, 0.5);
        prop_assert!(kick_route_gap(&state, phi) < 1e-10);
    }

    #[test]
    fn map_preserves_area(theta in -PI..PI, j in -3.0f64..3.0, k in 0.0f64..1.5) {
        let p = EpsCoords::new(theta, j);
        prop_assert!(jacobian_defect(p, k) < 1e-8);
        prop_assert!(area_defect(p, k) < 1e-4);
    }

    #[test]
    fn pendulum_energy_is_conserved(theta in -PI..PI, jp in -2.0f64..2.0, x in 0.5f64..10.0) {
        prop_assert!(energy_drift_rate(theta, jp, x, default_step(x)) < 1e-8);
    }

    #[test]
    fn initial_density_moments_and_period(gamma in -PI..PI, theta in -PI..PI) {
        let (c, s) = density_moment_errors(gamma);
        prop_assert!(c < 1e-12 && s < 1e-12);
        let p = initial_density(theta, gamma);
        prop_assert!((p - initial_density(theta + TAU, gamma)).abs() < 1e-12);
        prop_assert!(p >= 0.0);
    }

    #[test]
    fn tau_round_trips(l in 1u32..4, eps in -0.5f64..0.5) {
        let tau = TAU * f64::from(l) + eps;
        let p = RatchetParams::from_tau(1.0, tau, 0.5, 0.0, 1).unwrap();
        prop_assert_eq!(p.l(), l);
        prop_assert!((p.eps() - eps).abs() < 1e-12);
        prop_assert!((p.tau() - tau).abs() < 1e-12);
    }

    // Exact only at resonance: off resonance the kinetic phase advances the
    // relative phase of the two initial components by eps every period.
    #[test]
    fn resonant_quantum_current_is_odd_in_gamma(phi in 0.5f64..3.5, gamma in -PI..PI) {
        let a = quantum_current(&RatchetParams::new(phi, 1, 0.0, 0.5, gamma, 6).unwrap()).unwrap();
        let b = quantum_current(&RatchetParams::new(phi, 1, 0.0, 0.5, -gamma, 6).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x + y).abs() < 1e-9, "{} vs {}", x, y);
        }
    }

    #[test]
    fn eps_classical_current_is_odd_in_gamma(phi in 0.5f64..3.5, eps in 0.001f64..0.2, gamma in -PI..PI) {
        let a = ensemble_current(&RatchetParams::new(phi, 1, eps, 0.5, gamma, 8).unwrap(), 1024, EnsembleMode::Deterministic, 0).unwrap();
        let b = ensemble_current(&RatchetParams::new(phi, 1, eps, 0.5, -gamma, 8).unwrap(), 1024, EnsembleMode::Deterministic, 0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x + y).abs() < 1e-9 * (1.0 + x.abs()), "{} vs {}", x, y);
        }
    }

    #[test]
    fn doubling_the_basis_changes_nothing(phi in 0.5f64..3.5, eps in -0.2f64..0.2, gamma in -PI..PI) {
        let p = RatchetParams::new(phi, 1, eps, 0.5, gamma, 10).unwrap();
        let a = mean_current(&evolve(&p, 128).unwrap());
        let b = mean_current(&evolve(&p, 256).unwrap());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn eps_classical_sign_symmetry(phi in 0.5f64..3.5, eps in 0.001f64..0.2, gamma in -PI..PI) {
        let plus = RatchetParams::new(phi, 1, eps, 0.5, gamma, 8).unwrap();
        let minus = plus.with_eps(-eps).unwrap();
        let a = ensemble_current(&plus, 1024, EnsembleMode::Deterministic, 0).unwrap();
        let b = ensemble_current(&minus, 1024, EnsembleMode::Deterministic, 0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()), "{} vs {}", x, y);
        }
    }

    #[test]
    fn sampled_mode_reproducible(seed in any::<u64>(), eps in 0.01f64..0.2) {
        let p = RatchetParams::new(2.6, 1, eps, 0.5, -1.0, 5).unwrap();
        let a = ensemble_current(&p, 256, EnsembleMode::Sampled, seed).unwrap();
        let b = ensemble_current(&p, 256, EnsembleMode::Sampled, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn scaling_quadrature_converged(x in 0.1f64..10.0) {
        let a = scaling_f(x, 4096).unwrap();
        let b = scaling_f(x, 8192).unwrap();
        prop_assert!((a - b).abs() < 1e-6, "x = {}: {} vs {}", x, a, b);
    }
}

#[test]
fn map_step_is_drift_then_kick() {
    let p = map_step(EpsCoords::new(1.0, 0.5), 0.3);
    assert_eq!(p.theta, 1.5);
    assert_eq!(p.j, 0.5 + 0.3 * 1.5f64.sin());
}
