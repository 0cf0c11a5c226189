//! The fractional heat kernel `p_t` and every kernel-level quantity the
//! scaling lemmas use.
//!
//! `p_t` is the fundamental solution of `v_t = Δ^{α/2} v`; under the
//! convention `(Fφ)(ξ) = ∫ e^{−2πiξx} φ(x) dx` its transform is
//! `F p_t(ξ) = exp(−t (2π|ξ|)^α)`. Evaluation is by discrete inverse
//! Fourier transform on a periodic grid standing in for the line, with the
//! grid chosen so that both the spectral tail and the wrap-around images
//! are below requested thresholds. For α = 2 the kernel is the Gaussian
//! `N(0, 2t)`; for α = 1 it is the Cauchy density `t/(π(t² + x²))`.

use std::sync::OnceLock;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{signed_index, FftPair};
use crate::quad;
use crate::special::{gamma, normal_cdf};

const N_MAX: usize = 1 << 24;

/// Grid requirements for an automatically sized kernel grid.
#[derive(Debug, Clone, Copy)]
pub struct KernelResolution {
    /// Largest |x| at which the table will be read.
    pub x_max: f64,
    /// Spectral truncation threshold: `exp(−t(2πξ_max)^α) < tail_eps`.
    pub tail_eps: f64,
    /// Wrap-around threshold: estimated `p_t(L/2) < alias_eps`.
    pub alias_eps: f64,
    /// Minimum grid points per kernel width `t^{1/α}` (L¹ integrals of
    /// kinked integrands converge like (Δx · density)⁻²; 0 disables).
    pub min_density: f64,
}

impl KernelResolution {
    pub fn window(x_max: f64) -> Self {
        KernelResolution {
            x_max,
            tail_eps: 1e-12,
            alias_eps: 1e-12,
            min_density: 0.0,
        }
    }

    pub fn with_alias_eps(mut self, eps: f64) -> Self {
        self.alias_eps = eps;
        self
    }

    pub fn with_min_density(mut self, density: f64) -> Self {
        self.min_density = density;
        self
    }

    /// Thresholds targeting a relative error against the true line kernel on
    /// `|x| ≤ x_max` (used by the closed-form comparisons, where the density
    /// far from the bulk is the accuracy limiter).
    pub fn for_relative_error(alpha: f64, t: f64, x_max: f64, rel_tol: f64) -> Self {
        let floor = tail_density_estimate(alpha, t, x_max).max(f64::MIN_POSITIVE);
        KernelResolution {
            x_max,
            tail_eps: (0.25 * rel_tol * floor * t).min(1e-12),
            alias_eps: 0.25 * rel_tol * floor,
            min_density: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub enum KernelGridChoice {
    Auto(KernelResolution),
    Explicit { length: f64, points: usize },
}

/// One kernel evaluation request.
#[derive(Debug, Clone)]
pub struct KernelQuery {
    pub alpha: f64,
    pub t: f64,
    pub grid: KernelGridChoice,
}

impl KernelQuery {
    pub fn auto(alpha: f64, t: f64, x_max: f64) -> Self {
        KernelQuery {
            alpha,
            t,
            grid: KernelGridChoice::Auto(KernelResolution::window(x_max)),
        }
    }
}

/// Sampled kernel densities on a symmetric grid.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub alpha: f64,
    pub t: f64,
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
}

impl KernelTable {
    /// Trapezoidal mass over the fundamental domain.
    pub fn mass(&self) -> f64 {
        let n = self.values.len();
        if n < 2 {
            return f64::NAN;
        }
        let dx = self.abscissae[1] - self.abscissae[0];
        let interior: f64 = crate::util::pairwise_sum(&self.values);
        dx * (interior - 0.5 * (self.values[0] + self.values[n - 1]))
    }

    /// Total mass of negative excursions (discretization diagnostic).
    pub fn negativity_mass(&self) -> f64 {
        let dx = self.abscissae[1] - self.abscissae[0];
        dx * self
            .values
            .iter()
            .filter(|v| **v < 0.0)
            .map(|v| -v)
            .sum::<f64>()
    }

    /// Values with tiny negative densities clamped to zero (for sampling
    /// purposes only; bound checks must use the raw values).
    pub fn clamped_values(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v.max(0.0)).collect()
    }
}

/// Spectral representation of one kernel: symbol samples on its grid.
#[derive(Debug)]
pub struct SpectralKernel {
    alpha: f64,
    t: f64,
    length: f64,
    points: usize,
    /// `exp(−t (2π j/L)^α)` for j = 0..=N/2.
    symbol: Vec<f64>,
    period: OnceLock<Vec<f64>>,
}

fn validate_alpha_t(alpha: f64, t: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::parameter(
            "alpha",
            format!("must lie in (0,2], got {alpha}"),
        ));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::parameter("t", format!("must be positive, got {t}")));
    }
    Ok(())
}

/// Heavy-tail amplitude: `p_t(x) ~ A_α t |x|^{−1−α}` with
/// `A_α = sin(απ/2) Γ(1+α) / π` (vanishes at α = 2).
pub fn tail_amplitude(alpha: f64) -> f64 {
    (alpha * std::f64::consts::FRAC_PI_2).sin() * gamma(1.0 + alpha) / std::f64::consts::PI
}

/// Conservative estimate of `p_t(x)` far in the tail, used for grid sizing.
fn tail_density_estimate(alpha: f64, t: f64, x: f64) -> f64 {
    if alpha == 2.0 {
        (-x * x / (4.0 * t)).exp() / (4.0 * std::f64::consts::PI * t).sqrt()
    } else {
        2.0 * tail_amplitude(alpha) * t / x.powf(1.0 + alpha)
    }
}

/// Inverse of the tail estimate: distance at which the density estimate
/// drops below `eps`.
fn alias_distance(alpha: f64, t: f64, eps: f64) -> f64 {
    if alpha == 2.0 {
        let arg = -(eps * (4.0 * std::f64::consts::PI * t).sqrt()).ln();
        (4.0 * t * arg.max(0.0)).sqrt()
    } else {
        (2.0 * tail_amplitude(alpha) * t / eps).powf(1.0 / (1.0 + alpha))
    }
}

impl SpectralKernel {
    /// Automatically sized grid: doubles L until the wrap-around estimate at
    /// L/2 clears `alias_eps`, then doubles N until the spectral tail clears
    /// `tail_eps`.
    pub fn build(alpha: f64, t: f64, res: &KernelResolution) -> Result<Self> {
        validate_alpha_t(alpha, t)?;
        if !(res.x_max >= 0.0 && res.x_max.is_finite()) {
            return Err(Error::parameter("x_max", "must be finite and nonnegative"));
        }
        let scale = t.powf(1.0 / alpha);
        let mut length = (4.0 * scale)
            .max(2.5 * res.x_max.max(scale))
            .max(alias_distance(alpha, t, res.alias_eps) + 1.25 * res.x_max);
        while tail_density_estimate(alpha, t, 0.5 * length) >= res.alias_eps
            || tail_density_estimate(alpha, t, length - res.x_max) >= res.alias_eps
        {
            length *= 2.0;
            if !length.is_finite() {
                return Err(Error::Numerical(
                    "kernel grid length diverged during refinement".into(),
                ));
            }
        }
        let mut points = 256usize;
        let density_points = (res.min_density * length / scale).ceil();
        while (points as f64) < density_points
            || symbol_tail(alpha, t, length, points) >= res.tail_eps
        {
            points *= 2;
            if points > N_MAX {
                return Err(Error::Resolution {
                    required_points: points,
                    message: format!(
                        "resolution rules (tail < {:.1e}, density {} pts per width) need more than {N_MAX} points at L = {length:.3e}",
                        res.tail_eps, res.min_density
                    ),
                });
            }
        }
        Self::with_grid(alpha, t, length, points, res.tail_eps)
    }

    /// Explicit grid; validates the spectral tail rule and names the
    /// resolution that would be required when the grid is too coarse.
    pub fn with_grid(
        alpha: f64,
        t: f64,
        length: f64,
        points: usize,
        tail_eps: f64,
    ) -> Result<Self> {
        validate_alpha_t(alpha, t)?;
        if length <= 0.0 || !length.is_finite() || points < 8 || !points.is_power_of_two() {
            return Err(Error::parameter(
                "grid",
                format!("need length > 0 and a power-of-two point count >= 8, got L={length}, N={points}"),
            ));
        }
        if symbol_tail(alpha, t, length, points) >= tail_eps {
            let mut needed = points;
            while needed <= N_MAX && symbol_tail(alpha, t, length, needed) >= tail_eps {
                needed *= 2;
            }
            return Err(Error::Resolution {
                required_points: needed,
                message: format!(
                    "Fourier tail {:.3e} at xi_max = N/(2L) exceeds {:.1e}",
                    symbol_tail(alpha, t, length, points),
                    tail_eps
                ),
            });
        }
        let half = points / 2;
        let symbol = (0..=half)
            .map(|j| {
                let xi = j as f64 / length;
                (-t * (2.0 * std::f64::consts::PI * xi).powf(alpha)).exp()
            })
            .collect();
        Ok(SpectralKernel {
            alpha,
            t,
            length,
            points,
            symbol,
            period: OnceLock::new(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dx(&self) -> f64 {
        self.length / self.points as f64
    }

    fn symbol_at_bin(&self, k: usize) -> f64 {
        self.symbol[signed_index(k, self.points).unsigned_abs() as usize]
    }

    /// Kernel samples over one period (index m ↦ p(m·dx), wrapped).
    pub fn period_values(&self) -> &[f64] {
        self.period.get_or_init(|| {
            let pair = FftPair::new(self.points);
            let spec: Vec<Complex64> = (0..self.points)
                .map(|k| Complex64::new(self.symbol_at_bin(k), 0.0))
                .collect();
            let inv_l = 1.0 / self.length;
            pair.inverse_real(&spec).into_iter().map(|v| v * inv_l).collect()
        })
    }

    /// Symmetric table on [−L/2, L/2]; evenness is exact by construction
    /// (the negative half mirrors the nonnegative half).
    pub fn table(&self) -> KernelTable {
        let period = self.period_values();
        let half = self.points / 2;
        let dx = self.dx();
        let mut abscissae = Vec::with_capacity(self.points + 1);
        let mut values = Vec::with_capacity(self.points + 1);
        for m in (1..=half).rev() {
            abscissae.push(-(m as f64) * dx);
            values.push(period[m]);
        }
        for m in 0..=half {
            abscissae.push(m as f64 * dx);
            values.push(period[m]);
        }
        KernelTable {
            alpha: self.alpha,
            t: self.t,
            abscissae,
            values,
        }
    }

    /// Odd gradient table on [−L/2, L/2] via the transform of
    /// `2πiξ · F p_t(ξ)`.
    pub fn gradient_table(&self) -> KernelTable {
        let pair = FftPair::new(self.points);
        let spec: Vec<Complex64> = (0..self.points)
            .map(|k| {
                let f = signed_index(k, self.points) as f64 / self.length;
                Complex64::new(0.0, 2.0 * std::f64::consts::PI * f) * self.symbol_at_bin(k)
            })
            .collect();
        let inv_l = 1.0 / self.length;
        let period: Vec<f64> = pair.inverse_real(&spec).into_iter().map(|v| v * inv_l).collect();
        let half = self.points / 2;
        let dx = self.dx();
        let mut abscissae = Vec::with_capacity(self.points + 1);
        let mut values = Vec::with_capacity(self.points + 1);
        for m in (1..=half).rev() {
            abscissae.push(-(m as f64) * dx);
            values.push(-period[m]);
        }
        abscissae.push(0.0);
        values.push(0.0);
        for m in 1..=half {
            abscissae.push(m as f64 * dx);
            values.push(period[m]);
        }
        KernelTable {
            alpha: self.alpha,
            t: self.t,
            abscissae,
            values,
        }
    }

    /// Trigonometric-series evaluation at an arbitrary point (the grid
    /// kernel is a trig polynomial, so this is exact for the torus kernel).
    pub fn value_at(&self, x: f64) -> f64 {
        let half = self.points / 2;
        let w = 2.0 * std::f64::consts::PI * x / self.length;
        let mut acc = self.symbol[0];
        for j in 1..half {
            acc += 2.0 * self.symbol[j] * (w * j as f64).cos();
        }
        acc += self.symbol[half] * (w * half as f64).cos();
        acc / self.length
    }

    pub fn gradient_at(&self, x: f64) -> f64 {
        let half = self.points / 2;
        let w = 2.0 * std::f64::consts::PI * x / self.length;
        let mut acc = 0.0;
        for j in 1..half {
            let freq = 2.0 * std::f64::consts::PI * j as f64 / self.length;
            acc -= 2.0 * freq * self.symbol[j] * (w * j as f64).sin();
        }
        let freq = std::f64::consts::PI * self.points as f64 / self.length;
        acc -= freq * self.symbol[half] * (w * half as f64).sin();
        acc / self.length
    }

    /// `∫ |p_t(y−x) − p_t(y)| dy`, the shift realized as an exact Fourier
    /// phase on the torus.
    pub fn l1_space_modulus(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let pair = FftPair::new(self.points);
        let spec: Vec<Complex64> = (0..self.points)
            .map(|k| {
                let f = signed_index(k, self.points) as f64 / self.length;
                let phase = -2.0 * std::f64::consts::PI * f * x;
                Complex64::from_polar(self.symbol_at_bin(k), phase)
            })
            .collect();
        let inv_l = 1.0 / self.length;
        let shifted: Vec<f64> = pair.inverse_real(&spec).into_iter().map(|v| v * inv_l).collect();
        let base = self.period_values();
        let dx = self.dx();
        let diffs: Vec<f64> = shifted
            .iter()
            .zip(base)
            .map(|(s, b)| (s - b).abs())
            .collect();
        dx * crate::util::pairwise_sum(&diffs)
    }

    /// Discrete convolution with a field sampled on this kernel's grid,
    /// normalized so that convolving with the all-ones field returns the
    /// kernel mass.
    pub fn convolve(&self, w: &[f64]) -> Result<Vec<f64>> {
        if w.len() != self.points {
            return Err(Error::Input(format!(
                "field length {} does not match kernel grid of {} points",
                w.len(),
                self.points
            )));
        }
        if !w.iter().all(|v| v.is_finite()) {
            return Err(Error::Input("test function is not finite on the grid".into()));
        }
        let pair = FftPair::new(self.points);
        let mut spec = pair.forward_real(w);
        for (k, c) in spec.iter_mut().enumerate() {
            *c *= self.symbol_at_bin(k);
        }
        let inv_n = 1.0 / self.points as f64;
        Ok(pair.inverse_real(&spec).into_iter().map(|v| v * inv_n).collect())
    }
}

fn symbol_tail(alpha: f64, t: f64, length: f64, points: usize) -> f64 {
    let xi_max = points as f64 / (2.0 * length);
    (-t * (2.0 * std::f64::consts::PI * xi_max).powf(alpha)).exp()
}

/// Sampled kernel densities for a query ([`KernelTable`]).
pub fn kernel_table(q: &KernelQuery) -> Result<KernelTable> {
    Ok(spectral_kernel(q)?.table())
}

/// Sampled kernel gradient for a query.
pub fn kernel_gradient_table(q: &KernelQuery) -> Result<KernelTable> {
    Ok(spectral_kernel(q)?.gradient_table())
}

pub fn spectral_kernel(q: &KernelQuery) -> Result<SpectralKernel> {
    match &q.grid {
        KernelGridChoice::Auto(res) => SpectralKernel::build(q.alpha, q.t, res),
        KernelGridChoice::Explicit { length, points } => {
            SpectralKernel::with_grid(q.alpha, q.t, *length, *points, 1e-12)
        }
    }
}

/// Closed-form central value `p_t(0) = Γ(1 + 1/α) / (π t^{1/α})`, obtained
/// by radial integration of the Fourier form.
pub fn kernel_central_value(alpha: f64, t: f64) -> Result<f64> {
    validate_alpha_t(alpha, t)?;
    Ok(gamma(1.0 + 1.0 / alpha) / (std::f64::consts::PI * t.powf(1.0 / alpha)))
}

/// Bound-ratio table for a query, evaluated on the table abscissae inside
/// the requested window.
pub fn kernel_bound_ratio_table(q: &KernelQuery) -> Result<Vec<(f64, f64)>> {
    let kernel = spectral_kernel(q)?;
    let x_max = match &q.grid {
        KernelGridChoice::Auto(res) => res.x_max,
        KernelGridChoice::Explicit { length, .. } => length / 2.0,
    };
    let table = kernel.table();
    let xs: Vec<f64> = table
        .abscissae
        .iter()
        .copied()
        .filter(|x| x.abs() <= x_max)
        .collect();
    Ok(kernel_bound_ratio(&kernel, &xs))
}

/// Two-sided bound ratio `r(t,x) = p_t(x) (t^{1/α} + |x|)^{1+α} / t`
/// evaluated at the given abscissae.
pub fn kernel_bound_ratio(kernel: &SpectralKernel, xs: &[f64]) -> Vec<(f64, f64)> {
    let t = kernel.t();
    let alpha = kernel.alpha();
    let scale = t.powf(1.0 / alpha);
    xs.iter()
        .map(|&x| {
            let r = kernel.value_at(x) * (scale + x.abs()).powf(1.0 + alpha) / t;
            (x, r)
        })
        .collect()
}

/// Gradient bound ratio `|∂p_t(x)| (t^{1/α} + |x|)^{3+α} / (t |x|)` for x ≠ 0.
pub fn gradient_bound_ratio(kernel: &SpectralKernel, xs: &[f64]) -> Vec<(f64, f64)> {
    let t = kernel.t();
    let alpha = kernel.alpha();
    let scale = t.powf(1.0 / alpha);
    xs.iter()
        .filter(|&&x| x != 0.0)
        .map(|&x| {
            let r = kernel.gradient_at(x).abs() * (scale + x.abs()).powf(3.0 + alpha)
                / (t * x.abs());
            (x, r)
        })
        .collect()
}

/// Grid rules for the L¹ moduli: the absolute-value integrand has kinks, so
/// accuracy is set by point density; Gaussian kernels are compact enough to
/// afford closed-form-grade thresholds, heavy tails get sweep-grade ones.
pub(crate) fn modulus_resolution(alpha: f64, x_max: f64) -> KernelResolution {
    if alpha == 2.0 {
        KernelResolution::window(x_max).with_min_density(4096.0)
    } else {
        KernelResolution::window(x_max)
            .with_alias_eps(1e-7)
            .with_min_density(256.0)
    }
}

/// `∫ |p_t(y−x) − p_t(y)| dy` built on an automatically sized grid.
pub fn l1_space_modulus(alpha: f64, t: f64, x: f64) -> Result<f64> {
    let res = modulus_resolution(alpha, x.abs().max(t.powf(1.0 / alpha)));
    let kernel = SpectralKernel::build(alpha, t, &res)?;
    Ok(kernel.l1_space_modulus(x))
}

/// `∫ |p_{t+ε}(y) − p_t(y)| dy` with both kernels on a shared grid whose
/// aliasing rule honors the wider kernel and whose tail rule honors the
/// sharper one.
pub fn l1_time_modulus(alpha: f64, t: f64, eps: f64) -> Result<f64> {
    validate_alpha_t(alpha, t)?;
    if eps < 0.0 {
        return Err(Error::parameter("eps", format!("must be nonnegative, got {eps}")));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    let res = modulus_resolution(alpha, (t + eps).powf(1.0 / alpha));
    let wide = SpectralKernel::build(alpha, t + eps, &res)?;
    // Shared grid: length from the wide kernel, points refined for t.
    let mut points = wide.points();
    while symbol_tail(alpha, t, wide.length(), points) >= res.tail_eps {
        points *= 2;
        if points > N_MAX {
            return Err(Error::Resolution {
                required_points: points,
                message: "time-modulus shared grid exceeded the point budget".into(),
            });
        }
    }
    let k1 = SpectralKernel::with_grid(alpha, t, wide.length(), points, res.tail_eps)?;
    let k2 = SpectralKernel::with_grid(alpha, t + eps, wide.length(), points, res.tail_eps)?;
    let dx = k1.dx();
    let diffs: Vec<f64> = k2
        .period_values()
        .iter()
        .zip(k1.period_values())
        .map(|(a, b)| (a - b).abs())
        .collect();
    Ok(dx * crate::util::pairwise_sum(&diffs))
}

/// A bounded ρ-Hölder test function on the torus.
pub struct HolderFunction<'a> {
    pub rho: f64,
    pub holder_constant: f64,
    pub f: &'a (dyn Fn(f64) -> f64 + Sync),
}

/// `|∫ (p_t(x−y) − p_t(z−y)) w(y) dy|` on the kernel's grid.
pub fn smoothing_space_gap(
    kernel: &SpectralKernel,
    x: f64,
    z: f64,
    w: &HolderFunction<'_>,
) -> Result<f64> {
    if x == z {
        return Ok(0.0);
    }
    let samples = sample_on_grid(kernel, w)?;
    let conv = kernel.convolve(&samples)?;
    let vx = eval_trig(&conv, kernel.length(), x);
    let vz = eval_trig(&conv, kernel.length(), z);
    Ok((vx - vz).abs())
}

/// `|∫ (p_{t+δ}(x−y) − p_t(x−y)) w(y) dy|`; both kernels share the grid.
pub fn smoothing_time_gap(
    kernel: &SpectralKernel,
    delta: f64,
    x: f64,
    w: &HolderFunction<'_>,
) -> Result<f64> {
    if delta < 0.0 {
        return Err(Error::parameter("delta", format!("must be nonnegative, got {delta}")));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    let later = SpectralKernel::with_grid(
        kernel.alpha(),
        kernel.t() + delta,
        kernel.length(),
        kernel.points(),
        1.0, // tail rule already validated for the sharper kernel
    )?;
    let samples = sample_on_grid(kernel, w)?;
    let c1 = kernel.convolve(&samples)?;
    let c2 = later.convolve(&samples)?;
    let v1 = eval_trig(&c1, kernel.length(), x);
    let v2 = eval_trig(&c2, kernel.length(), x);
    Ok((v2 - v1).abs())
}

/// Convenience forms of the smoothing gaps that build their own grid; the
/// test function must be periodic with period dividing 256π (the built-in
/// |sin y|^ρ family is).
pub fn smoothing_space_gap_at(
    alpha: f64,
    t: f64,
    x: f64,
    z: f64,
    w: &HolderFunction<'_>,
) -> Result<f64> {
    let kernel = smoothing_grid_kernel(alpha, t)?;
    smoothing_space_gap(&kernel, x, z, w)
}

pub fn smoothing_time_gap_at(
    alpha: f64,
    t: f64,
    delta: f64,
    x: f64,
    w: &HolderFunction<'_>,
) -> Result<f64> {
    let kernel = smoothing_grid_kernel(alpha, t)?;
    smoothing_time_gap(&kernel, delta, x, w)
}

fn smoothing_grid_kernel(alpha: f64, t: f64) -> Result<SpectralKernel> {
    let length = 256.0 * std::f64::consts::PI;
    let mut points = 1usize << 14;
    while symbol_tail(alpha, t, length, points) >= 1e-12 {
        points *= 2;
        if points > N_MAX {
            return Err(Error::Resolution {
                required_points: points,
                message: "smoothing grid exceeded the point budget".into(),
            });
        }
    }
    SpectralKernel::with_grid(alpha, t, length, points, 1e-12)
}

fn sample_on_grid(kernel: &SpectralKernel, w: &HolderFunction<'_>) -> Result<Vec<f64>> {
    let dx = kernel.dx();
    let samples: Vec<f64> = (0..kernel.points()).map(|m| (w.f)(m as f64 * dx)).collect();
    if !samples.iter().all(|v| v.is_finite()) {
        return Err(Error::Input("Hoelder test function is unbounded on the grid".into()));
    }
    Ok(samples)
}

fn eval_trig(values: &[f64], length: f64, x: f64) -> f64 {
    crate::fft::TrigSeries::from_field(values, length).eval(x)
}

/// Quadrature value of `(p_t ∗ f_β)(0) = ∫ g_{1−β}(ξ) e^{−t(2π|ξ|)^α} dξ`.
pub fn riesz_smoothed_at_zero(alpha: f64, beta: f64, t: f64) -> Result<f64> {
    validate_alpha_t(alpha, t)?;
    let c = t * (2.0 * std::f64::consts::PI).powf(alpha);
    let q = quad::power_weighted_exp_integral(beta, alpha, c, 1e-11)?;
    Ok(2.0 * q.value)
}

/// Closed form `2Γ(β/α) / (α ((2π)^α t)^{β/α})` for the same quantity.
pub fn riesz_smoothed_closed_form(alpha: f64, beta: f64, t: f64) -> Result<f64> {
    validate_alpha_t(alpha, t)?;
    if !(0.0 < beta && beta < 1.0) {
        return Err(Error::parameter("beta", format!("must lie in (0,1), got {beta}")));
    }
    let c = t * (2.0 * std::f64::consts::PI).powf(alpha);
    Ok(2.0 * gamma(beta / alpha) / (alpha * c.powf(beta / alpha)))
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct WeightedEnergy {
    pub alpha: f64,
    pub beta: f64,
    pub t: f64,
    pub quadrature: f64,
    pub closed_form: f64,
    pub rel_err: f64,
}

/// `∫ g_{1−β}(ξ) |F p_t(ξ)|² dξ` both by quadrature and by the closed form
/// `2Γ(β/α) / (α (2^{α+1} π^α t)^{β/α})`.
pub fn weighted_transform_energy(alpha: f64, beta: f64, t: f64) -> Result<WeightedEnergy> {
    validate_alpha_t(alpha, t)?;
    if !(0.0 < beta && beta < 1.0) {
        return Err(Error::parameter("beta", format!("must lie in (0,1), got {beta}")));
    }
    let c = 2.0 * t * (2.0 * std::f64::consts::PI).powf(alpha);
    let q = quad::power_weighted_exp_integral(beta, alpha, c, 1e-11)?;
    let quadrature = 2.0 * q.value;
    let closed_form = 2.0 * gamma(beta / alpha)
        / (alpha * (2f64.powf(alpha + 1.0) * std::f64::consts::PI.powf(alpha) * t).powf(beta / alpha));
    Ok(WeightedEnergy {
        alpha,
        beta,
        t,
        quadrature,
        closed_form,
        rel_err: (quadrature - closed_form).abs() / closed_form,
    })
}

/// Gaussian reference density (α = 2 kernel is `N(0, 2t)`).
pub fn gaussian_density(t: f64, x: f64) -> f64 {
    (-x * x / (4.0 * t)).exp() / (4.0 * std::f64::consts::PI * t).sqrt()
}

/// Cauchy reference density (α = 1).
pub fn cauchy_density(t: f64, x: f64) -> f64 {
    t / (std::f64::consts::PI * (t * t + x * x))
}

/// Closed-form Gaussian L¹ space modulus: `4Φ(x/(2σ)) − 2`, σ² = 2t.
pub fn gaussian_l1_space_modulus(t: f64, x: f64) -> f64 {
    let sigma = (2.0 * t).sqrt();
    4.0 * normal_cdf(x.abs() / (2.0 * sigma)) - 2.0
}

/// Closed-form Gaussian L¹ time modulus between `N(0,2t)` and `N(0,2(t+ε))`.
pub fn gaussian_l1_time_modulus(t: f64, eps: f64) -> f64 {
    if eps == 0.0 {
        return 0.0;
    }
    let a = 2.0 * t;
    let b = 2.0 * (t + eps);
    let x_star = (a * b * (b / a).ln() / (b - a)).sqrt();
    4.0 * (normal_cdf(x_star / a.sqrt()) - normal_cdf(x_star / b.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_value_matches_gaussian_and_cauchy() {
        // Γ(3/2)/(π √0.25) = 1/√π
        let g = kernel_central_value(2.0, 0.25).unwrap();
        assert!((g - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
        let c = kernel_central_value(1.0, 2.0).unwrap();
        assert!((c - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn central_value_alpha_1p2_matches_quadrature() {
        // p_t(0) = ∫ e^{−t(2πξ)^α} dξ; independent route via the singular
        // integrator with a non-singular weight is not available, so use
        // adaptive Simpson directly (the integrand is smooth at 0).
        let (alpha, t) = (1.2, 1.0);
        let f = |xi: f64| (-t * (2.0 * std::f64::consts::PI * xi).powf(alpha)).exp();
        let q = crate::quad::adaptive_simpson(&f, 0.0, 40.0, 1e-13).unwrap();
        let closed = kernel_central_value(alpha, t).unwrap();
        assert!(((2.0 * q.value) - closed).abs() / closed < 1e-9);
    }

    #[test]
    fn table_matches_gaussian_closed_form() {
        let q = KernelQuery::auto(2.0, 0.25, 6.0);
        let k = spectral_kernel(&q).unwrap();
        for &x in &[0.0, 0.3, 1.0, 2.5, 4.0] {
            let v = k.value_at(x);
            let g = gaussian_density(0.25, x);
            assert!((v - g).abs() / g < 1e-10, "x={x}: {v} vs {g}");
        }
    }

    #[test]
    fn table_matches_cauchy_closed_form() {
        let res = KernelResolution::for_relative_error(1.0, 1.0, 8.0, 1e-8);
        let k = SpectralKernel::build(1.0, 1.0, &res).unwrap();
        for &x in &[0.0, 0.5, 1.0, 3.0, 8.0] {
            let v = k.value_at(x);
            let c = cauchy_density(1.0, x);
            assert!((v - c).abs() / c < 1e-8, "x={x}: {v} vs {c}");
        }
    }

    #[test]
    fn central_value_alpha_1p5_frozen() {
        // Radial integration of the Fourier form gives Γ(1+1/α)/(π t^{1/α});
        // frozen value recomputed by the quadrature oracle below.
        let v = kernel_central_value(1.5, 1.0).unwrap();
        assert!((v - 0.2873527).abs() < 1e-6, "{v}");
        let f = |xi: f64| (-(2.0 * std::f64::consts::PI * xi).powf(1.5)).exp();
        let q = crate::quad::adaptive_simpson(&f, 0.0, 10.0, 1e-13).unwrap();
        assert!((2.0 * q.value - v).abs() / v < 1e-9);
        let query = KernelQuery::auto(1.5, 1.0, 4.0);
        let k = spectral_kernel(&query).unwrap();
        assert!((k.value_at(0.0) - v).abs() / v < 1e-8);
    }

    #[test]
    fn table_is_even_and_normalized() {
        let q = KernelQuery::auto(1.5, 0.7, 5.0);
        let table = kernel_table(&q).unwrap();
        let n = table.values.len();
        for i in 0..n / 2 {
            assert_eq!(table.values[i], table.values[n - 1 - i]);
            assert_eq!(table.abscissae[i], -table.abscissae[n - 1 - i]);
        }
        assert!((table.mass() - 1.0).abs() < 1e-9, "mass {}", table.mass());
        assert!(table.values.iter().all(|&v| v > -1e-12));
    }

    #[test]
    fn gradient_is_odd_and_matches_gaussian() {
        let q = KernelQuery::auto(2.0, 0.5, 5.0);
        let k = spectral_kernel(&q).unwrap();
        let gt = k.gradient_table();
        let n = gt.values.len();
        for i in 0..n / 2 {
            assert_eq!(gt.values[i], -gt.values[n - 1 - i]);
        }
        assert_eq!(k.gradient_at(0.0), 0.0);
        for &x in &[0.4, 1.1, 2.0] {
            let expected = -x / (2.0 * 0.5) * gaussian_density(0.5, x);
            let got = k.gradient_at(x);
            assert!((got - expected).abs() / expected.abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn self_similarity_is_exact_with_proportional_grids() {
        let alpha = 1.5;
        let base = SpectralKernel::with_grid(alpha, 1.0, 64.0, 1 << 12, 1e-12).unwrap();
        for &t in &[0.25f64, 4.0] {
            let scale = t.powf(1.0 / alpha);
            let scaled =
                SpectralKernel::with_grid(alpha, t, 64.0 * scale, 1 << 12, 1e-12).unwrap();
            for m in [0usize, 7, 101, 999] {
                let x = scaled.dx() * m as f64;
                let lhs = scaled.value_at(x);
                let rhs = base.value_at(x / scale) / scale;
                assert!((lhs - rhs).abs() / rhs.abs().max(1e-300) < 1e-10);
            }
        }
    }

    #[test]
    fn semigroup_property_on_shared_grid() {
        let alpha = 1.5;
        let (l, n) = (128.0, 1 << 13);
        let k1 = SpectralKernel::with_grid(alpha, 0.4, l, n, 1e-12).unwrap();
        let k2 = SpectralKernel::with_grid(alpha, 0.6, l, n, 1e-12).unwrap();
        let ksum = SpectralKernel::with_grid(alpha, 1.0, l, n, 1e-12).unwrap();
        let conv = k1.convolve(k2.period_values()).unwrap();
        let direct = ksum.period_values();
        let mut worst = 0.0f64;
        for (a, b) in conv.iter().zip(direct) {
            worst = worst.max((a - b).abs());
        }
        assert!(worst < 1e-6, "semigroup discrepancy {worst}");
    }

    #[test]
    fn bound_ratio_examples() {
        // Cauchy at x = 0: r = p_1(0) · 1 / 1 = 1/π.
        let res = KernelResolution::window(4.0).with_alias_eps(1e-9);
        let k = SpectralKernel::build(1.0, 1.0, &res).unwrap();
        let r = kernel_bound_ratio(&k, &[0.0]);
        assert!((r[0].1 - 1.0 / std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn l1_space_modulus_gaussian_closed_form() {
        let v = l1_space_modulus(2.0, 0.5, 2.0).unwrap();
        let exact = gaussian_l1_space_modulus(0.5, 2.0);
        assert!((exact - (4.0 * normal_cdf(1.0) - 2.0)).abs() < 1e-14);
        assert!((v - exact).abs() < 1e-8, "{v} vs {exact}");
        assert!((v - 1.3654).abs() < 1e-4);
    }

    #[test]
    fn l1_space_modulus_basic_properties() {
        assert_eq!(l1_space_modulus(1.5, 1.0, 0.0).unwrap(), 0.0);
        let mut prev = 0.0;
        for &x in &[0.1, 0.4, 1.0, 3.0, 10.0, 100.0] {
            let v = l1_space_modulus(1.5, 1.0, x).unwrap();
            assert!(v >= prev - 1e-12, "not monotone at {x}");
            assert!(v <= 2.0 + 1e-9, "cap violated at {x}: {v}");
            prev = v;
        }
    }

    #[test]
    fn l1_time_modulus_gaussian_closed_form() {
        let v = l1_time_modulus(2.0, 1.0, 1.0).unwrap();
        let exact = gaussian_l1_time_modulus(1.0, 1.0);
        assert!((v - exact).abs() < 1e-8, "{v} vs {exact}");
        assert_eq!(l1_time_modulus(2.0, 1.0, 0.0).unwrap(), 0.0);
        assert!(l1_time_modulus(2.0, -1.0, 0.5).is_err());
    }

    #[test]
    fn l1_time_modulus_nondecreasing_in_eps_and_capped() {
        let mut prev = 0.0;
        for &eps in &[0.1, 0.5, 2.0, 20.0, 500.0] {
            let v = l1_time_modulus(1.5, 0.5, eps).unwrap();
            assert!(v >= prev - 1e-10, "not monotone at eps={eps}");
            assert!(v <= 2.0 + 1e-9);
            prev = v;
        }
    }

    #[test]
    fn smoothing_gaps_vanish_for_constant_function() {
        let k = SpectralKernel::with_grid(1.5, 1.0, 64.0 * std::f64::consts::PI, 1 << 12, 1e-12)
            .unwrap();
        let w = HolderFunction {
            rho: 0.5,
            holder_constant: 1.0,
            f: &|_y: f64| 3.7,
        };
        let gap = smoothing_space_gap(&k, 1.0, 2.5, &w).unwrap();
        assert!(gap.abs() < 1e-9, "gap {gap}");
        let tgap = smoothing_time_gap(&k, 0.5, 1.0, &w).unwrap();
        assert!(tgap.abs() < 1e-9, "tgap {tgap}");
        assert_eq!(smoothing_space_gap(&k, 1.0, 1.0, &w).unwrap(), 0.0);
        assert_eq!(smoothing_time_gap(&k, 0.0, 1.0, &w).unwrap(), 0.0);
    }

    #[test]
    fn riesz_smoothed_matches_frozen_value_and_scaling() {
        // α=2, β=0.5, t=1: Γ(1/4)/(4π²)^{1/4} ≈ 1.446378
        let v = riesz_smoothed_closed_form(2.0, 0.5, 1.0).unwrap();
        assert!((v - 1.4464).abs() < 1e-4);
        let q = riesz_smoothed_at_zero(2.0, 0.5, 1.0).unwrap();
        assert!((q - v).abs() / v < 1e-8);
        // exact power law: value(4t)/value(t) = 4^{−β/α}
        let r = riesz_smoothed_closed_form(1.5, 0.5, 4.0).unwrap()
            / riesz_smoothed_closed_form(1.5, 0.5, 1.0).unwrap();
        assert!((r - 4f64.powf(-0.5 / 1.5)).abs() < 1e-12);
    }

    #[test]
    fn weighted_energy_identity() {
        let e = weighted_transform_energy(2.0, 0.5, 1.0).unwrap();
        assert!((e.closed_form - 1.2163).abs() < 1e-4);
        assert!(e.rel_err < 1e-6, "rel err {}", e.rel_err);
        // doubling ratio 2^{−β/α}
        let e2 = weighted_transform_energy(1.5, 0.75, 0.2).unwrap();
        let e1 = weighted_transform_energy(1.5, 0.75, 0.1).unwrap();
        assert!((e2.closed_form / e1.closed_form - 2f64.powf(-0.5)).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(kernel_central_value(2.5, 1.0).is_err());
        assert!(kernel_central_value(1.5, 0.0).is_err());
        assert!(riesz_smoothed_closed_form(1.5, 1.2, 1.0).is_err());
        let coarse = SpectralKernel::with_grid(1.5, 1.0, 1024.0, 256, 1e-12);
        match coarse {
            Err(Error::Resolution { required_points, .. }) => assert!(required_points > 256),
            other => panic!("expected resolution error, got {other:?}"),
        }
    }
}
