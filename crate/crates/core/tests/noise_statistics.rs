//! Monte Carlo validation of the colored-noise sampler statistics.

use fracheat_core::grid::SpaceGrid;
use fracheat_core::noise::{
    empirical_covariance, riesz_kernel_value, sample_increment, NoiseIncrement, NoiseSpec,
    ZeroModeRule,
};
use fracheat_core::util::{jackknife_stderr, mean, pairwise_sum};

fn spec(beta: f64, dt: f64) -> NoiseSpec {
    let grid = SpaceGrid::new(32.0, 1 << 10).unwrap();
    NoiseSpec::new(
        beta,
        grid,
        dt,
        2024,
        ZeroModeRule::kernel_matched(beta, 32.0).unwrap(),
    )
    .unwrap()
}

fn draw(spec: &NoiseSpec, n: usize) -> Vec<NoiseIncrement> {
    (0..n).map(|i| sample_increment(spec, 0, i as u64)).collect()
}

#[test]
fn sample_mean_vanishes_within_error() {
    let spec = spec(0.5, 0.01);
    let incs = draw(&spec, 10_000);
    // fixed grid point, mean over draws
    let at_point: Vec<f64> = incs.iter().map(|inc| inc.values[17]).collect();
    let m = mean(&at_point);
    let se = jackknife_stderr(&at_point);
    assert!(m.abs() < 4.0 * se, "mean {m} vs stderr {se}");
}

#[test]
fn covariance_matches_riesz_kernel_at_moderate_lag() {
    let spec = spec(0.5, 0.01);
    let incs = draw(&spec, 10_000);
    let est = empirical_covariance(&incs, &spec.grid, 0.5).unwrap();
    let target = 0.01 * riesz_kernel_value(0.5, 0.5).unwrap();
    let rel = (est.estimate - target).abs() / target;
    assert!(rel < 0.05, "rel dev {rel:.4} (est {}, target {target})", est.estimate);
}

#[test]
fn covariance_slope_matches_minus_beta() {
    // log estimate vs log lag over one decade ~ -beta
    let spec = spec(0.5, 0.01);
    let incs = draw(&spec, 6_000);
    let lags = [0.25, 0.5, 1.0, 2.0];
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for &lag in &lags {
        let est = empirical_covariance(&incs, &spec.grid, lag).unwrap();
        lx.push(lag.ln());
        ly.push(est.estimate.ln());
    }
    let (slope, _, _) = fracheat_core::util::ols(&lx, &ly);
    assert!((slope + 0.5).abs() < 0.05, "slope {slope}");
}

#[test]
fn estimates_are_stationary_across_base_positions() {
    // Cross-moment restricted to the two half-grids agrees within error bars.
    let spec = spec(0.5, 0.01);
    let incs = draw(&spec, 4_000);
    let n = spec.grid.points();
    let shift = spec.grid.lag_index(0.5).unwrap();
    let half_avg = |range: std::ops::Range<usize>| -> (f64, f64) {
        let per_draw: Vec<f64> = incs
            .iter()
            .map(|inc| {
                let prods: Vec<f64> = range
                    .clone()
                    .map(|m| inc.values[m] * inc.values[(m + shift) % n])
                    .collect();
                pairwise_sum(&prods) / prods.len() as f64
            })
            .collect();
        (mean(&per_draw), jackknife_stderr(&per_draw))
    };
    let (a, sa) = half_avg(0..n / 2);
    let (b, sb) = half_avg(n / 2..n);
    let gap = (a - b).abs();
    let se = (sa * sa + sb * sb).sqrt();
    assert!(gap < 4.0 * se, "halves differ: {a} vs {b} (se {se})");
}

#[test]
fn parallel_generation_matches_sequential() {
    use rayon::prelude::*;
    let spec = spec(0.3, 0.05);
    let sequential: Vec<NoiseIncrement> =
        (0..64).map(|i| sample_increment(&spec, 7, i)).collect();
    let parallel: Vec<NoiseIncrement> = (0..64u64)
        .into_par_iter()
        .map(|i| sample_increment(&spec, 7, i))
        .collect();
    assert_eq!(sequential, parallel);
}
