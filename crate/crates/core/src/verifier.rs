//! Deterministic numerical checks for every kernel-level inequality and
//! closed-form identity: two-sided kernel bounds, L¹ space/time moduli,
//! Hölder smoothing, Riesz sup decay, the weighted-transform Gamma identity,
//! and the elementary log inequality.
//!
//! Fitted constants are reported, never asserted against specific values.
//! Where an inequality's constant is uniform in a swept scale, the check
//! gates on the stability of per-scale fits; self-similarity makes the
//! kernel-level ratios literally invariant under `x ↦ x/t^{1/α}` when the
//! grids are scaled proportionally, and that literal collapse is the
//! strongest of these tests.

use crate::error::Result;
use crate::fft::TrigSeries;
use crate::kernel::{
    gaussian_l1_space_modulus, gaussian_l1_time_modulus, kernel_bound_ratio,
    riesz_smoothed_at_zero, riesz_smoothed_closed_form, weighted_transform_energy,
    KernelResolution, SpectralKernel,
};
use crate::report::CheckReport;
use crate::util::{logspace, ols};

/// Relaxed aliasing threshold for ratio sweeps: bound fits need ~1e-4
/// relative kernel accuracy, not closed-form accuracy.
const SWEEP_ALIAS_EPS: f64 = 1e-9;

fn scaled_family(
    alpha: f64,
    ts: &[f64],
    res: &KernelResolution,
) -> Result<(Vec<SpectralKernel>, f64, usize)> {
    let base = SpectralKernel::build(alpha, 1.0, res)?;
    let (l1, n1) = (base.length(), base.points());
    let kernels = ts
        .iter()
        .map(|&t| SpectralKernel::with_grid(alpha, t, l1 * t.powf(1.0 / alpha), n1, 1e-12))
        .collect::<Result<Vec<_>>>()?;
    Ok((kernels, l1, n1))
}

/// Eq.-level two-sided bound: `r(t,x) = p_t(x)(t^{1/α}+|x|)^{1+α}/t` must be
/// bounded away from 0 and ∞, and by self-similarity the curves collapse
/// under `s = x/t^{1/α}` across t decades.
pub fn check_kernel_bounds(alphas: &[f64], ts: &[f64], s_max: f64, s_points: usize) -> Result<CheckReport> {
    let s_grid = crate::util::linspace(0.0, s_max, s_points);
    let mut violations = 0u64;
    let mut stability = 1.0f64;
    let mut c1_global = f64::INFINITY;
    let mut c2_global = 0.0f64;
    let mut notes = Vec::new();
    for &alpha in alphas {
        let res = KernelResolution::window(s_max).with_alias_eps(SWEEP_ALIAS_EPS);
        let (kernels, _, _) = scaled_family(alpha, ts, &res)?;
        let mut curves: Vec<Vec<f64>> = Vec::with_capacity(ts.len());
        for (k, &t) in kernels.iter().zip(ts) {
            let xs: Vec<f64> = s_grid.iter().map(|&s| s * t.powf(1.0 / alpha)).collect();
            let ratios: Vec<f64> = kernel_bound_ratio(k, &xs).into_iter().map(|(_, r)| r).collect();
            for &r in &ratios {
                if !r.is_finite() || r <= 0.0 {
                    violations += 1;
                }
                c1_global = c1_global.min(r);
                c2_global = c2_global.max(r);
            }
            curves.push(ratios);
        }
        for i in 0..s_grid.len() {
            let col: Vec<f64> = curves.iter().map(|c| c[i]).collect();
            let (lo, hi) = col
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            if lo > 0.0 {
                stability = stability.max(hi / lo);
            }
        }
        let (c1a, c2a) = curves.iter().flatten().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
        notes.push(format!("alpha={alpha}: c1={c1a:.6e}, c2={c2a:.6e}, c2/c1={:.4e}", c2a / c1a));
        if alpha == 1.0 {
            // Cauchy spot value: r(t, 0) = 1/π for every t.
            let r0 = kernel_bound_ratio(&kernels[0], &[0.0])[0].1;
            let expected = 1.0 / std::f64::consts::PI;
            if (r0 - expected).abs() > 1e-8 {
                violations += 1;
                notes.push(format!("Cauchy spot check failed: r(0) = {r0}"));
            } else {
                notes.push(format!("Cauchy spot check: r(0) = {r0:.10} vs 1/pi"));
            }
        }
    }
    Ok(CheckReport {
        check_name: "kernel_two_sided_bound".into(),
        parameter_grid: format!("alpha in {alphas:?}, t in {ts:?}, |x| <= {s_max} t^(1/alpha)"),
        fitted_constant: c2_global,
        stability_ratio: stability,
        stability_cap: 1.01,
        violations,
        pass: false,
        tolerance: 0.01,
        notes,
    }
    .finalize())
}

/// Lemma-level L¹ spatial modulus: value ≤ 2 always, value/( (|x|/t^{1/α}) ∧ 1 )
/// bounded with a t-stable fitted constant; Gaussian rows cross-checked
/// against the erf closed form.
pub fn check_space_modulus(alphas: &[f64], ts: &[f64], s_list: &[f64]) -> Result<CheckReport> {
    let cap_tol = 1e-9;
    let cross_tol = 1e-6;
    let mut violations = 0u64;
    let mut stability = 1.0f64;
    let mut fitted = 0.0f64;
    let mut notes = Vec::new();
    for &alpha in alphas {
        let x_max = s_list.iter().fold(0.0f64, |a, &s| a.max(s));
        let res = crate::kernel::modulus_resolution(alpha, x_max);
        let (kernels, _, _) = scaled_family(alpha, ts, &res)?;
        let mut per_t = Vec::with_capacity(ts.len());
        for (kernel, &t) in kernels.iter().zip(ts) {
            let scale = t.powf(1.0 / alpha);
            let mut c_t = 0.0f64;
            for &s in s_list {
                if s == 0.0 {
                    continue; // excluded point of the bound (0/0)
                }
                let value = kernel.l1_space_modulus(s * scale);
                if value > 2.0 + cap_tol {
                    violations += 1;
                    notes.push(format!("cap: alpha={alpha} t={t} s={s}: value={value}"));
                }
                if alpha == 2.0 {
                    let exact = gaussian_l1_space_modulus(t, s * scale);
                    if (value - exact).abs() > cross_tol {
                        violations += 1;
                        notes.push(format!(
                            "erf cross-check: t={t} x={}: {value} vs {exact}",
                            s * scale
                        ));
                    }
                }
                c_t = c_t.max(value / s.min(1.0));
            }
            per_t.push(c_t);
            fitted = fitted.max(c_t);
        }
        let (lo, hi) = per_t
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        stability = stability.max(hi / lo);
        notes.push(format!("alpha={alpha}: fitted C per t = {per_t:?}"));
    }
    Ok(CheckReport {
        check_name: "l1_space_modulus".into(),
        parameter_grid: format!("alpha in {alphas:?}, t in {ts:?}, {} dimensionless shifts", s_list.len()),
        fitted_constant: fitted,
        stability_ratio: stability,
        stability_cap: 3.0,
        violations,
        pass: false,
        tolerance: cross_tol,
        notes,
    }
    .finalize())
}

/// Lemma-level L¹ temporal modulus against `(log(t+ε) − log t) ∧ 1`.
pub fn check_time_modulus(alphas: &[f64], ts: &[f64], ratios: &[f64]) -> Result<CheckReport> {
    let cap_tol = 1e-9;
    let cross_tol = 1e-6;
    let mut violations = 0u64;
    let mut stability = 1.0f64;
    let mut fitted = 0.0f64;
    let mut notes = Vec::new();
    for &alpha in alphas {
        let mut per_t = vec![0.0f64; ts.len()];
        // Also record the alternative reading with the minimum applied after
        // the constant: C' = sup value / log(1+r) over r <= 1 only.
        let mut alt_fit = 0.0f64;
        for &r in ratios {
            if r == 0.0 {
                continue;
            }
            // Shared proportional grid per ratio: sized for the wider kernel,
            // point density set by the sharper one (width 1 at t = 1).
            let res = crate::kernel::modulus_resolution(alpha, (1.0 + r).powf(1.0 / alpha));
            let base = SpectralKernel::build(alpha, 1.0 + r, &res)?;
            let (l1, mut n1) = (base.length(), base.points());
            while symbol_tail_of(alpha, 1.0, l1, n1) >= 1e-12
                || (n1 as f64) < res.min_density * l1
            {
                n1 *= 2;
            }
            for (i, &t) in ts.iter().enumerate() {
                let scale = t.powf(1.0 / alpha);
                let k_lo = SpectralKernel::with_grid(alpha, t, l1 * scale, n1, 1e-12)?;
                let k_hi = SpectralKernel::with_grid(alpha, t * (1.0 + r), l1 * scale, n1, 1e-12)?;
                let dx = k_lo.dx();
                let diffs: Vec<f64> = k_hi
                    .period_values()
                    .iter()
                    .zip(k_lo.period_values())
                    .map(|(a, b)| (a - b).abs())
                    .collect();
                let value = dx * crate::util::pairwise_sum(&diffs);
                if value > 2.0 + cap_tol {
                    violations += 1;
                    notes.push(format!("cap: alpha={alpha} t={t} eps/t={r}: value={value}"));
                }
                if alpha == 2.0 {
                    let exact = gaussian_l1_time_modulus(t, t * r);
                    if (value - exact).abs() > cross_tol {
                        violations += 1;
                        notes.push(format!("erf cross-check: t={t} eps={}: {value} vs {exact}", t * r));
                    }
                }
                let bound = r.ln_1p().min(1.0);
                per_t[i] = per_t[i].max(value / bound);
                if r <= 1.0 {
                    alt_fit = alt_fit.max(value / r.ln_1p());
                }
            }
        }
        let (lo, hi) = per_t
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        stability = stability.max(hi / lo);
        fitted = fitted.max(hi);
        notes.push(format!(
            "alpha={alpha}: fitted C per t = {per_t:?}; min-after-constant reading C' = {alt_fit:.6}"
        ));
    }
    Ok(CheckReport {
        check_name: "l1_time_modulus".into(),
        parameter_grid: format!("alpha in {alphas:?}, t in {ts:?}, eps/t in {ratios:?}"),
        fitted_constant: fitted,
        stability_ratio: stability,
        stability_cap: 3.0,
        violations,
        pass: false,
        tolerance: cross_tol,
        notes,
    }
    .finalize())
}

fn symbol_tail_of(alpha: f64, t: f64, length: f64, points: usize) -> f64 {
    let xi = points as f64 / (2.0 * length);
    (-t * (2.0 * std::f64::consts::PI * xi).powf(alpha)).exp()
}

/// Hölder smoothing: with `w = |sin y|^ρ` (Hölder constant 1) the space gap
/// obeys `gap ≤ |x−z|^ρ` and the time gap obeys
/// `gap ≤ ∫ p_δ(y) |y|^ρ dy` exactly (the proof's chain); both are checked
/// with zero tolerance beyond discretization slack, and fitted prefactors
/// must be stable across the ρ sweep.
pub fn check_smoothing(alpha: f64, ts: &[f64], rhos: &[f64]) -> Result<CheckReport> {
    let length = 256.0 * std::f64::consts::PI;
    let points = 1usize << 17;
    let slack = 1e-6;
    let space_lags: Vec<f64> = (0..7).map(|i| 2f64.powi(i - 6)).collect(); // 2^-6 .. 1
    let deltas: Vec<f64> = (0..7).map(|i| 2f64.powi(i - 8)).collect(); // 2^-8 .. 2^-2
    let mut violations = 0u64;
    let mut per_rho_space = Vec::new();
    let mut per_rho_time = Vec::new();
    let mut notes = Vec::new();
    for &rho in rhos {
        let w: Vec<f64> = (0..points)
            .map(|m| {
                let y = m as f64 * length / points as f64;
                y.sin().abs().powf(rho)
            })
            .collect();
        let mut c_space = 0.0f64;
        let mut c_time = 0.0f64;
        for &t in ts {
            let kernel = SpectralKernel::with_grid(alpha, t, length, points, 1e-12)?;
            let conv = TrigSeries::from_field(&kernel.convolve(&w)?, length);
            // gaps anchored at the kink of |sin| at y = 0 (symmetric pairs
            // around the kink cancel: conv is even there)
            for &h in &space_lags {
                let gap = (conv.eval(h) - conv.eval(0.0)).abs();
                let ratio = gap / h.powf(rho);
                if ratio > 1.0 + slack {
                    violations += 1;
                    notes.push(format!("space cap: rho={rho} t={t} h={h}: ratio={ratio}"));
                }
                c_space = c_space.max(ratio);
            }
            for &d in &deltas {
                let later = SpectralKernel::with_grid(alpha, t + d, length, points, 1e-12)?;
                let conv2 = TrigSeries::from_field(&later.convolve(&w)?, length);
                let gap = (conv2.eval(0.0) - conv.eval(0.0)).abs();
                // provable cap: ∫ p_δ(y) |y|^ρ dy on the same grid
                let small = SpectralKernel::with_grid(alpha, d, length, points, 1e-12)?;
                let table = small.table();
                let dx = table.abscissae[1] - table.abscissae[0];
                let m_rho: f64 = table
                    .abscissae
                    .iter()
                    .zip(&table.values)
                    .map(|(&y, &p)| p * y.abs().powf(rho))
                    .sum::<f64>()
                    * dx;
                if gap > m_rho * (1.0 + slack) + slack * d.powf(rho / alpha) {
                    violations += 1;
                    notes.push(format!("time cap: rho={rho} t={t} d={d}: gap={gap} cap={m_rho}"));
                }
                c_time = c_time.max(gap / d.powf(rho / alpha));
            }
        }
        per_rho_space.push(c_space);
        per_rho_time.push(c_time);
        notes.push(format!("rho={rho}: C_space={c_space:.6}, C_time={c_time:.6}"));
    }
    let stability = {
        let span = |v: &[f64]| {
            let (lo, hi) = v
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
            hi / lo
        };
        span(&per_rho_space).max(span(&per_rho_time))
    };
    let fitted = per_rho_space
        .iter()
        .chain(&per_rho_time)
        .fold(0.0f64, |a, &b| a.max(b));
    Ok(CheckReport {
        check_name: "holder_smoothing".into(),
        parameter_grid: format!("alpha={alpha}, t in {ts:?}, rho in {rhos:?}"),
        fitted_constant: fitted,
        stability_ratio: stability,
        stability_cap: 3.0,
        violations,
        pass: false,
        tolerance: slack,
        notes,
    }
    .finalize())
}

/// `(p_t ∗ f_β)(0)` decays as `t^{−β/α}`: log-log slope within 1e-3 of the
/// exact exponent and quadrature agreeing with the closed form to 1e-6.
pub fn check_riesz_sup(alphas: &[f64], betas: &[f64], ts: &[f64]) -> Result<CheckReport> {
    let slope_tol = 1e-3;
    let rel_tol = 1e-6;
    let mut violations = 0u64;
    let mut stability = 1.0f64;
    let mut fitted = 0.0f64;
    let mut notes = Vec::new();
    for &alpha in alphas {
        for &beta in betas {
            let mut lnt = Vec::new();
            let mut lnv = Vec::new();
            let mut prefactors = Vec::new();
            for &t in ts {
                let quad = riesz_smoothed_at_zero(alpha, beta, t)?;
                let closed = riesz_smoothed_closed_form(alpha, beta, t)?;
                let rel = (quad - closed).abs() / closed;
                if rel > rel_tol {
                    violations += 1;
                    notes.push(format!("quad vs closed: a={alpha} b={beta} t={t}: rel={rel:.3e}"));
                }
                lnt.push(t.ln());
                lnv.push(quad.ln());
                prefactors.push(quad * t.powf(beta / alpha));
            }
            let (slope, intercept, _) = ols(&lnt, &lnv);
            let expected = -beta / alpha;
            if (slope - expected).abs() > slope_tol {
                violations += 1;
                notes.push(format!(
                    "slope: a={alpha} b={beta}: {slope:.6} vs {expected:.6}"
                ));
            }
            let (lo, hi) = prefactors
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            stability = stability.max(hi / lo);
            fitted = fitted.max(intercept.exp());
        }
    }
    notes.push("prefactor C(t) = value * t^(beta/alpha) is decade-invariant (exact power law)".into());
    Ok(CheckReport {
        check_name: "riesz_sup_decay".into(),
        parameter_grid: format!("alpha in {alphas:?}, beta in {betas:?}, t in {ts:?}"),
        fitted_constant: fitted,
        stability_ratio: stability,
        stability_cap: 1.01,
        violations,
        pass: false,
        tolerance: slope_tol,
        notes,
    }
    .finalize())
}

/// Closed-form identity `∫ g_{1−β}(ξ) |F p_t(ξ)|² dξ = 2Γ(β/α)/(α(2^{α+1}π^α t)^{β/α})`
/// against the singular-split quadrature.
pub fn check_gamma_identity(alphas: &[f64], betas: &[f64], ts: &[f64]) -> Result<CheckReport> {
    let rel_tol = 1e-6;
    let mut violations = 0u64;
    let mut worst = 0.0f64;
    let mut ratio_lo = f64::INFINITY;
    let mut ratio_hi = 0.0f64;
    let mut notes = Vec::new();
    for &alpha in alphas {
        for &beta in betas {
            for &t in ts {
                let e = weighted_transform_energy(alpha, beta, t).map_err(|err| {
                    crate::error::Error::Numerical(format!(
                        "gamma identity cell (alpha={alpha}, beta={beta}, t={t}): {err}"
                    ))
                })?;
                worst = worst.max(e.rel_err);
                ratio_lo = ratio_lo.min(e.quadrature / e.closed_form);
                ratio_hi = ratio_hi.max(e.quadrature / e.closed_form);
                if e.rel_err > rel_tol {
                    violations += 1;
                    notes.push(format!(
                        "cell alpha={alpha} beta={beta} t={t}: rel err {:.3e}",
                        e.rel_err
                    ));
                }
            }
            // exact dyadic scaling of the closed form
            let a = weighted_transform_energy(alpha, beta, 2.0)?;
            let b = weighted_transform_energy(alpha, beta, 1.0)?;
            let scaling = a.closed_form / b.closed_form;
            if (scaling - 2f64.powf(-beta / alpha)).abs() > 1e-12 {
                violations += 1;
                notes.push(format!("doubling ratio broken at alpha={alpha}, beta={beta}"));
            }
        }
    }
    notes.push(format!("max relative discrepancy {worst:.3e}"));
    Ok(CheckReport {
        check_name: "gamma_spectral_identity".into(),
        parameter_grid: format!("alpha in {alphas:?}, beta in {betas:?}, t in {ts:?}"),
        fitted_constant: worst,
        stability_ratio: ratio_hi / ratio_lo,
        stability_cap: 1.01,
        violations,
        pass: false,
        tolerance: rel_tol,
        notes,
    }
    .finalize())
}

/// Exhaustive scan of `0 < log(1+μ) ≤ μ^r` on μ ∈ logspace(1e−6, 1e3, 10⁴),
/// r ∈ 101 points of [1/2, 1], plus a sharpness probe below r = 1/2.
pub fn check_log_inequality() -> CheckReport {
    let mus = logspace(1e-6, 1e3, 10_000);
    let rs = crate::util::linspace(0.5, 1.0, 101);
    let mut violations = 0u64;
    let mut sup_ratio = 0.0f64;
    let mut decade_sups = [0.0f64; 10];
    for &mu in &mus {
        let lhs = mu.ln_1p();
        if lhs <= 0.0 || lhs.is_nan() {
            violations += 1;
            continue;
        }
        let ln_mu = mu.ln();
        let decade = (((mu.log10() + 6.0).floor() as i64).clamp(0, 9)) as usize;
        for &r in &rs {
            let rhs = (r * ln_mu).exp();
            if lhs > rhs {
                violations += 1;
            }
            let ratio = lhs / rhs;
            sup_ratio = sup_ratio.max(ratio);
            decade_sups[decade] = decade_sups[decade].max(ratio);
        }
    }
    let (lo, hi) = decade_sups
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let mut notes = vec![format!(
        "sup log(1+mu)/mu^r = {sup_ratio:.9}; per-decade sups span {:.4}x (the inequality is not scale-sharp; the gate here is zero violations)",
        hi / lo
    )];
    // Sharpness probe below the r >= 1/2 hypothesis: report where the
    // inequality first fails, or its absence.
    for &r in &[0.4, 0.35, 0.3, 0.2] {
        let mut worst = f64::NEG_INFINITY;
        let mut at = 0.0;
        for &mu in &mus {
            let h = mu.ln_1p() - (r * mu.ln()).exp();
            if h > worst {
                worst = h;
                at = mu;
            }
        }
        if worst > 0.0 {
            notes.push(format!(
                "probe r={r}: violated, max(log(1+mu)-mu^r) = {worst:.6} at mu = {at:.4}"
            ));
        } else {
            notes.push(format!(
                "probe r={r}: no violation on the grid, sup deficit {worst:.6} at mu = {at:.4}"
            ));
        }
    }
    CheckReport {
        check_name: "log_one_plus_mu".into(),
        parameter_grid: "mu in logspace(1e-6, 1e3, 10^4), r in 101 points of [0.5, 1]".into(),
        fitted_constant: sup_ratio,
        stability_ratio: hi / lo,
        stability_cap: 10.0,
        violations,
        pass: false,
        tolerance: 0.0,
        notes,
    }
    .finalize()
}

/// Default full verification suite (the `verify` subcommand).
pub fn run_all_checks() -> Result<Vec<CheckReport>> {
    let decade_ts = [0.01, 0.1, 1.0, 10.0];
    let id_alphas = [1.2, 1.5, 1.8, 2.0];
    let id_betas = [0.2, 0.5, 0.8, 0.95];
    let id_ts = [0.1, 1.0, 10.0];
    Ok(vec![
        check_kernel_bounds(&[1.0, 1.1, 1.5, 1.9, 2.0], &decade_ts, 10.0, 41)?,
        check_space_modulus(&[1.1, 1.5, 2.0], &decade_ts, &logspace(0.05, 20.0, 13))?,
        check_time_modulus(&[1.1, 1.5, 2.0], &decade_ts, &logspace(0.01, 100.0, 13))?,
        check_smoothing(1.5, &[0.1, 1.0, 10.0], &[0.3, 0.5, 0.7])?,
        check_riesz_sup(&id_alphas, &[0.2, 0.5, 0.8], &id_ts)?,
        check_gamma_identity(&id_alphas, &id_betas, &id_ts)?,
        check_log_inequality(),
    ])
}
