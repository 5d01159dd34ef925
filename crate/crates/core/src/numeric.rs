//! Small deterministic numerical helpers.

/// Pairwise (cascade) summation with a fixed split order, so results do not
/// depend on how callers parallelise the terms that feed it.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Midpoint grid of `n` angles covering `[-π, π)`, offset by half a cell.
pub fn angle_grid(n: usize) -> Vec<f64> {
    use std::f64::consts::{PI, TAU};
    let h = TAU / n as f64;
    (0..n).map(|i| -PI + (i as f64 + 0.5) * h).collect()
}
