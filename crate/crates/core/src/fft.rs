//! FFT plumbing shared by the kernel, noise, and solver modules.
//!
//! Conventions: the unnormalized forward transform is
//! `F_k = Σ_m x_m e^{−2πi k m/N}` and the unnormalized inverse is
//! `y_m = Σ_k c_k e^{+2πi k m/N}`; callers apply normalization explicitly.
//! Frequency bin `k` of a grid of length `L` carries the physical frequency
//! `f_k = k/L` for `k ≤ N/2` and `(k−N)/L` above.

use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

/// Cached forward/inverse plan pair for one transform length.
#[derive(Clone)]
pub struct FftPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    len: usize,
}

impl FftPair {
    pub fn new(len: usize) -> Self {
        let mut p = planner().lock().expect("fft planner poisoned");
        FftPair {
            forward: p.plan_fft_forward(len),
            inverse: p.plan_fft_inverse(len),
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.forward.process(buf);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.inverse.process(buf);
    }

    /// Unnormalized forward transform of a real field.
    pub fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut buf);
        buf
    }

    /// Unnormalized inverse transform, returning the real parts.
    pub fn inverse_real(&self, spectrum: &[Complex64]) -> Vec<f64> {
        let mut buf = spectrum.to_vec();
        self.inverse(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }
}

/// Signed frequency index of bin `k` on an `n`-point grid: `0,1,..,n/2,−n/2+1,..,−1`.
pub fn signed_index(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Trigonometric interpolant of a real grid field on a torus of the given
/// length: one forward transform at construction, O(N) per evaluation, exact
/// at grid points (up to rounding).
pub struct TrigSeries {
    coeffs: Vec<Complex64>,
    length: f64,
    n: usize,
}

impl TrigSeries {
    pub fn from_field(values: &[f64], length: f64) -> Self {
        let n = values.len();
        let pair = FftPair::new(n);
        TrigSeries {
            coeffs: pair.forward_real(values),
            length,
            n,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let half = self.n / 2;
        let w = 2.0 * std::f64::consts::PI * x / self.length;
        let mut acc = self.coeffs[0].re;
        for (j, c) in self.coeffs.iter().enumerate().take(half).skip(1) {
            let phase = w * j as f64;
            acc += 2.0 * (c.re * phase.cos() - c.im * phase.sin());
        }
        acc += self.coeffs[half].re * (w * half as f64).cos();
        acc / self.n as f64
    }
}
