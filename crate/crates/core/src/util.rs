//! Small numeric helpers shared across modules.

/// Deterministic pairwise summation. The reduction tree depends only on the
/// slice length, so parallel producers that fill fixed slots and then reduce
/// through this function are bit-reproducible under any schedule.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(values) / values.len() as f64
}

/// Standard error of the mean via leave-one-out jackknife. For the sample
/// mean this coincides with the classical `sd/sqrt(n)` estimate, but it is
/// computed in jackknife form so the same routine serves derived statistics.
pub fn jackknife_stderr(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::NAN;
    }
    let total = pairwise_sum(values);
    let full_mean = total / n as f64;
    let mut devs = Vec::with_capacity(n);
    for &v in values {
        let loo = (total - v) / (n - 1) as f64;
        devs.push((loo - full_mean) * (loo - full_mean));
    }
    ((n - 1) as f64 / n as f64 * pairwise_sum(&devs)).sqrt()
}

/// Ordinary least squares of y against x. Returns (slope, intercept,
/// slope standard error); the stderr is NaN with fewer than 3 points.
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = mean(x);
    let my = mean(y);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let se = if x.len() > 2 {
        let rss: f64 = x
            .iter()
            .zip(y)
            .map(|(&xi, &yi)| {
                let r = yi - (slope * xi + intercept);
                r * r
            })
            .sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    (slope, intercept, se)
}

/// log-spaced grid with `n` points from `a` to `b` inclusive.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a && n >= 2);
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Linearly spaced grid with `n` points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn next_pow2(n: usize) -> usize {
    let mut p = 1;
    while p < n {
        p <<= 1;
    }
    p
}
