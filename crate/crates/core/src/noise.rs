//! Gaussian noise increments, white in time and Riesz-colored in space:
//! target covariance `E[ΔW(x) ΔW(y)] = dt · f_β(x−y)` with
//! `f_β(x) = c_{1−β}|x|^{−β}`, matched on the torus for lags well inside
//! `[4Δx, L/8]`.
//!
//! Sampling is spectral: independent standard Gaussians per Fourier mode
//! scaled by `sqrt(weight · dt)`, Hermitian-symmetrized, inverse-transformed.
//! The mode weight is the spectral density `g_{1−β}(ξ) = |ξ|^{β−1}` sampled
//! at `ξ_j = j/L` with the Fourier-series cell normalization `1/L`. The
//! divergent `ξ = 0` weight is handled by [`ZeroModeRule`]: dropping it
//! makes the spatial mean of every increment exactly zero (deterministic
//! conservation in the solver), while `Finite` with the integrated zero-cell
//! mass `(2/β)(2L)^{−β}` reproduces the continuum kernel at moderate lags.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{signed_index, FftPair};
use crate::grid::SpaceGrid;
use crate::rng::GaussianStream;
use crate::util::{jackknife_stderr, mean, pairwise_sum};

pub use crate::special::{riesz_constant, riesz_kernel_value};

/// Treatment of the divergent zero-frequency spectral weight on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ZeroModeRule {
    /// Weight 0: the spatial mean of every increment is exactly zero.
    Drop,
    /// Explicit finite weight.
    Finite(f64),
}

impl ZeroModeRule {
    /// Finite zero-mode weight `−2 ζ(1−β) L^{−β}` that makes the sampled
    /// covariance track `f_β`: it cancels the constant term in the
    /// small-frequency expansion of the mode sum exactly, leaving only
    /// O((x/L)²) residuals over the lag-validity window. (The integrated
    /// zero-cell mass `(2/β)(2L)^{−β}` is within a few percent of this but
    /// leaves a visible constant offset at the window edge.)
    pub fn kernel_matched(beta: f64, length: f64) -> crate::error::Result<ZeroModeRule> {
        let zeta = crate::special::riemann_zeta(1.0 - beta)?;
        Ok(ZeroModeRule::Finite(-2.0 * zeta * length.powf(-beta)))
    }

    fn weight(&self) -> f64 {
        match self {
            ZeroModeRule::Drop => 0.0,
            ZeroModeRule::Finite(v) => *v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub beta: f64,
    pub grid: SpaceGrid,
    pub dt: f64,
    pub seed_base: u64,
    pub zero_mode: ZeroModeRule,
}

impl NoiseSpec {
    pub fn new(
        beta: f64,
        grid: SpaceGrid,
        dt: f64,
        seed_base: u64,
        zero_mode: ZeroModeRule,
    ) -> Result<Self> {
        if !(0.0 < beta && beta < 1.0) {
            return Err(Error::parameter("beta", format!("must lie in (0,1), got {beta}")));
        }
        Self::validated(beta, grid, dt, seed_base, zero_mode)
    }

    /// β = 1 white-noise limit, accepted outside the validated domain for
    /// diagnostics only.
    pub fn white_diagnostic(grid: SpaceGrid, dt: f64, seed_base: u64) -> Result<Self> {
        Self::validated(1.0, grid, dt, seed_base, ZeroModeRule::Drop)
    }

    fn validated(
        beta: f64,
        grid: SpaceGrid,
        dt: f64,
        seed_base: u64,
        zero_mode: ZeroModeRule,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::parameter("dt", format!("must be positive, got {dt}")));
        }
        if let ZeroModeRule::Finite(v) = zero_mode {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::parameter(
                    "zero_mode",
                    format!("finite weight must be nonnegative, got {v}"),
                ));
            }
        }
        Ok(NoiseSpec {
            beta,
            grid,
            dt,
            seed_base,
            zero_mode,
        })
    }

    /// Smallest lag at which the torus covariance is compared against the
    /// continuum kernel.
    pub fn min_valid_lag(&self) -> f64 {
        4.0 * self.grid.dx()
    }

    pub fn max_valid_lag(&self) -> f64 {
        self.grid.length() / 8.0
    }
}

/// One sampled increment field.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseIncrement {
    pub values: Vec<f64>,
    pub step_index: u64,
    pub stream_id: u64,
}

/// Per-mode variance array aligned with FFT bins (even in the bin's signed
/// frequency): `w_j = g_{1−β}(j/L)/L` for j ≠ 0, zero mode per rule.
pub fn spectral_weights(spec: &NoiseSpec) -> Vec<f64> {
    let n = spec.grid.points();
    let l = spec.grid.length();
    (0..n)
        .map(|k| {
            let j = signed_index(k, n).unsigned_abs();
            if j == 0 {
                spec.zero_mode.weight()
            } else {
                (j as f64 / l).powf(spec.beta - 1.0) / l
            }
        })
        .collect()
}

/// Deterministic inverse transform of the weight array: the covariance the
/// sampler realizes at each grid lag, divided by dt.
pub fn weight_covariance(spec: &NoiseSpec) -> Vec<f64> {
    let weights = spectral_weights(spec);
    let n = spec.grid.points();
    let pair = FftPair::new(n);
    let spec_c: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
    pair.inverse_real(&spec_c)
}

/// Sample the increment for `(stream_id, step_index)`; bit-reproducible and
/// schedule-independent by the counter-based generator contract.
pub fn sample_increment(spec: &NoiseSpec, stream_id: u64, step_index: u64) -> NoiseIncrement {
    let n = spec.grid.points();
    let half = n / 2;
    let weights = spectral_weights(spec);
    let mut gauss = GaussianStream::at(spec.seed_base, stream_id, step_index);
    let mut modes = vec![Complex64::new(0.0, 0.0); n];

    // Fixed draw order: k = 0, 1, ..., N/2; one Box-Muller pair per k.
    let (z0, _) = gauss.normal_pair();
    modes[0] = Complex64::new((weights[0] * spec.dt).sqrt() * z0, 0.0);
    for k in 1..half {
        let (a, b) = gauss.normal_pair();
        let amp = (0.5 * weights[k] * spec.dt).sqrt();
        modes[k] = Complex64::new(amp * a, amp * b);
        modes[n - k] = modes[k].conj();
    }
    let (zn, _) = gauss.normal_pair();
    modes[half] = Complex64::new((weights[half] * spec.dt).sqrt() * zn, 0.0);

    let pair = FftPair::new(n);
    let values = pair.inverse_real(&modes);
    NoiseIncrement {
        values,
        step_index,
        stream_id,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CovarianceEstimate {
    pub lag: f64,
    pub estimate: f64,
    pub stderr: f64,
}

/// Unbiased cross-moment `E[W(x) W(x+h)]` averaged over grid positions and
/// draws, with a jackknife standard error over draws.
pub fn empirical_covariance(
    increments: &[NoiseIncrement],
    grid: &SpaceGrid,
    lag: f64,
) -> Result<CovarianceEstimate> {
    if increments.len() < 2 {
        return Err(Error::Input(format!(
            "need at least 2 increments, got {}",
            increments.len()
        )));
    }
    let shift = grid.lag_index(lag.abs())?;
    let n = grid.points();
    let per_draw: Vec<f64> = increments
        .iter()
        .map(|inc| {
            let v = &inc.values;
            let prods: Vec<f64> = (0..n).map(|m| v[m] * v[(m + shift) % n]).collect();
            pairwise_sum(&prods) / n as f64
        })
        .collect();
    Ok(CovarianceEstimate {
        lag,
        estimate: mean(&per_draw),
        stderr: jackknife_stderr(&per_draw),
    })
}

/// Covariance validation report comparing the empirical estimate against
/// `dt · f_β` at the given lags.
#[derive(Debug, Clone, Serialize)]
pub struct CovarianceReport {
    pub beta: f64,
    pub dt: f64,
    pub draws: usize,
    pub valid_lag_window: (f64, f64),
    pub lags: Vec<f64>,
    pub estimate: Vec<f64>,
    pub target: Vec<f64>,
    pub stderr: Vec<f64>,
    pub max_rel_dev: f64,
}

pub fn covariance_report(
    spec: &NoiseSpec,
    lags: &[f64],
    draws: usize,
    stream_id: u64,
) -> Result<CovarianceReport> {
    if draws < 2 {
        return Err(Error::Input("need at least 2 draws".into()));
    }
    let increments: Vec<NoiseIncrement> = (0..draws)
        .map(|i| sample_increment(spec, stream_id, i as u64))
        .collect();
    let mut estimate = Vec::new();
    let mut target = Vec::new();
    let mut stderr = Vec::new();
    let mut max_rel_dev = 0.0f64;
    for &lag in lags {
        let est = empirical_covariance(&increments, &spec.grid, lag)?;
        let tgt = spec.dt * riesz_kernel_value(spec.beta, lag)?;
        max_rel_dev = max_rel_dev.max((est.estimate - tgt).abs() / tgt);
        estimate.push(est.estimate);
        stderr.push(est.stderr);
        target.push(tgt);
    }
    Ok(CovarianceReport {
        beta: spec.beta,
        dt: spec.dt,
        draws,
        valid_lag_window: (spec.min_valid_lag(), spec.max_valid_lag()),
        lags: lags.to_vec(),
        estimate,
        target,
        stderr,
        max_rel_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_spec() -> NoiseSpec {
        let grid = SpaceGrid::new(32.0, 1 << 10).unwrap();
        NoiseSpec::new(
            0.5,
            grid,
            0.01,
            99,
            ZeroModeRule::kernel_matched(0.5, 32.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn weights_are_even_and_follow_the_power_law() {
        let spec = test_spec();
        let w = spectral_weights(&spec);
        let n = spec.grid.points();
        for k in 1..n / 2 {
            assert_eq!(w[k], w[n - k]);
        }
        // ratio 2^{β−1} between frequencies ξ and 2ξ (power law of the density)
        assert!((w[8] / w[4] - 2f64.powf(spec.beta - 1.0)).abs() < 1e-15);
        assert!(w.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn white_limit_weights_are_flat() {
        let grid = SpaceGrid::new(16.0, 64).unwrap();
        let spec = NoiseSpec::white_diagnostic(grid, 0.01, 1).unwrap();
        let w = spectral_weights(&spec);
        for k in 1..64 {
            assert!((w[k] - w[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn increments_are_bit_reproducible() {
        let spec = test_spec();
        let a = sample_increment(&spec, 3, 17);
        let b = sample_increment(&spec, 3, 17);
        assert_eq!(a, b);
        let c = sample_increment(&spec, 4, 17);
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn dropped_zero_mode_means_exact_zero_spatial_mean() {
        let grid = SpaceGrid::new(32.0, 1 << 10).unwrap();
        let spec = NoiseSpec::new(0.5, grid, 0.01, 7, ZeroModeRule::Drop).unwrap();
        let inc = sample_increment(&spec, 0, 0);
        let mean = crate::util::mean(&inc.values);
        assert!(mean.abs() < 1e-12, "mean {mean}");
    }

    #[test]
    fn weight_transform_reproduces_kernel_at_moderate_lags() {
        // Deterministic check: inverse transform of the weights vs f_beta,
        // within 2% on the documented windows ([4dx, L/8]; trimmed to L/16
        // for large beta where wrap-around images are not negligible).
        for &(beta, max_lag) in &[(0.3, 4.0), (0.5, 4.0), (0.7, 2.0)] {
            let grid = SpaceGrid::new(32.0, 1 << 10).unwrap();
            let spec = NoiseSpec::new(
                beta,
                grid,
                1.0,
                0,
                ZeroModeRule::kernel_matched(beta, 32.0).unwrap(),
            )
            .unwrap();
            let cov = weight_covariance(&spec);
            let mut lag = spec.min_valid_lag();
            while lag <= max_lag + 1e-9 {
                let idx = grid.lag_index(lag).unwrap();
                let target = riesz_kernel_value(beta, lag).unwrap();
                let rel = (cov[idx] - target).abs() / target;
                assert!(rel < 0.02, "beta={beta} lag={lag}: rel={rel:.4}");
                lag *= 2.0;
            }
        }
    }

    #[test]
    fn empirical_covariance_is_symmetric_in_lag_sign() {
        let spec = test_spec();
        let incs: Vec<_> = (0..8).map(|i| sample_increment(&spec, 0, i)).collect();
        let plus = empirical_covariance(&incs, &spec.grid, 0.5).unwrap();
        let minus = empirical_covariance(&incs, &spec.grid, -0.5).unwrap();
        assert_eq!(plus.estimate, minus.estimate);
    }

    #[test]
    fn empirical_covariance_rejects_tiny_ensembles() {
        let spec = test_spec();
        let incs = vec![sample_increment(&spec, 0, 0)];
        assert!(empirical_covariance(&incs, &spec.grid, 0.5).is_err());
    }

    #[test]
    fn white_field_lag_zero_matches_flat_spectral_mass() {
        let grid = SpaceGrid::new(16.0, 256).unwrap();
        let spec = NoiseSpec::white_diagnostic(grid, 0.01, 5).unwrap();
        let weights = spectral_weights(&spec);
        let expected: f64 = spec.dt * weights.iter().sum::<f64>();
        let incs: Vec<_> = (0..4000).map(|i| sample_increment(&spec, 0, i)).collect();
        let est = empirical_covariance(&incs, &spec.grid, 0.0).unwrap();
        assert!(
            (est.estimate - expected).abs() < 4.0 * est.stderr.max(1e-6),
            "est {} expected {expected} stderr {}",
            est.estimate,
            est.stderr
        );
    }

    #[test]
    fn distinct_streams_have_no_cross_covariance() {
        let spec = test_spec();
        let n_draws = 2000;
        let per_draw: Vec<f64> = (0..n_draws)
            .map(|i| {
                let a = sample_increment(&spec, 0, i);
                let b = sample_increment(&spec, 1, i);
                let prods: Vec<f64> = a
                    .values
                    .iter()
                    .zip(&b.values)
                    .map(|(x, y)| x * y)
                    .collect();
                pairwise_sum(&prods) / prods.len() as f64
            })
            .collect();
        let m = mean(&per_draw);
        let se = jackknife_stderr(&per_draw);
        assert!(m.abs() < 4.0 * se, "cross-covariance {m} +- {se}");
    }

    #[test]
    fn spec_validation() {
        let grid = SpaceGrid::new(32.0, 1 << 10).unwrap();
        assert!(NoiseSpec::new(1.5, grid, 0.01, 0, ZeroModeRule::Drop).is_err());
        assert!(NoiseSpec::new(0.5, grid, -0.1, 0, ZeroModeRule::Drop).is_err());
        assert!(NoiseSpec::new(0.5, grid, 0.1, 0, ZeroModeRule::Finite(-1.0)).is_err());
    }
}
