//! Special functions. Thin wrappers over libm plus the combinations the
//! model needs (Riesz normalization constant, Gaussian CDF).

use crate::error::{Error, Result};

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Riesz normalization `c_β = 2 sin(βπ/2) Γ(1−β) / (2π)^{1−β}`, β ∈ (0,1).
///
/// Satisfies `c_β · c_{1−β} = 1` (the transform pair applied twice), which
/// the tests use as an independent consistency oracle.
pub fn riesz_constant(beta: f64) -> Result<f64> {
    if !(0.0 < beta && beta < 1.0) {
        return Err(Error::parameter(
            "beta",
            format!("must lie in (0,1), got {beta}"),
        ));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    Ok(2.0 * (beta * std::f64::consts::FRAC_PI_2).sin() * gamma(1.0 - beta)
        / two_pi.powf(1.0 - beta))
}

/// Riemann zeta for real s < 1 or s > 1 (undefined at s = 1), via the
/// Dirichlet eta function with Cohen-Rodriguez Villegas-Zagier acceleration
/// of the alternating series; full double precision on the s ∈ (0,1) range
/// the noise discretization needs.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if s == 1.0 || !s.is_finite() {
        return Err(Error::parameter("s", format!("zeta undefined at s = {s}")));
    }
    let n = 48usize;
    let mut d = (3.0 + 8f64.sqrt()).powi(n as i32);
    d = 0.5 * (d + 1.0 / d);
    let mut b = -1.0;
    let mut c = -d;
    let mut sum = 0.0;
    for k in 0..n {
        c = b - c;
        sum += c * ((k + 1) as f64).powf(-s);
        let kf = k as f64;
        b *= (kf + n as f64) * (kf - n as f64) / ((kf + 0.5) * (kf + 1.0));
    }
    let eta = sum / d;
    Ok(eta / (1.0 - 2f64.powf(1.0 - s)))
}

/// Riesz covariance kernel `f_β(x) = c_{1−β} |x|^{−β}`.
pub fn riesz_kernel_value(beta: f64, x: f64) -> Result<f64> {
    if !(0.0 < beta && beta < 1.0) {
        return Err(Error::parameter(
            "beta",
            format!("must lie in (0,1), got {beta}"),
        ));
    }
    if x == 0.0 {
        return Err(Error::Singularity(
            "f_beta diverges at x = 0 (integrable singularity)".into(),
        ));
    }
    Ok(riesz_constant(1.0 - beta)? * x.abs().powf(-beta))
}
