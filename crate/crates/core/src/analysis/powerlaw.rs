//! Discrete power-law fitting with a Kolmogorov-Smirnov goodness measure.
//!
//! The exponent is the maximum-likelihood estimate for the discrete law
//! `P(X = k) = k^-alpha / zeta(alpha, x_min)`, found by matching the model's
//! mean log to the sample's (the likelihood is concave, so bisection on the
//! score suffices). The closed-form shifted-continuous approximation
//! `1 + n / sum ln(x_i / (x_min - 0.5))` seeds the bracket; at small cutoffs
//! it is biased by more than the tolerance our recovery checks allow, so it
//! is not used as the final estimate.

use serde::Serialize;

use crate::error::{Error, Result};

/// Minimum tail size accepted for a fit.
pub const MIN_TAIL: usize = 50;

/// Lower-cutoff selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XMin {
    Fixed(u64),
    /// Try every distinct sample value with a large enough tail and keep the
    /// cutoff minimizing the KS statistic.
    Auto,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PowerLawFit {
    /// Maximum-likelihood exponent of the discrete power law.
    pub alpha: f64,
    pub x_min: u64,
    /// Supremum gap between the empirical tail CDF and the fitted law.
    pub ks_statistic: f64,
    /// Number of samples at or above `x_min`.
    pub n_tail: usize,
}

/// Fit a discrete power law to positive integer samples.
pub fn power_law_fit(samples: &[u64], x_min: XMin) -> Result<PowerLawFit> {
    let mut sorted: Vec<u64> = samples.iter().copied().filter(|&x| x > 0).collect();
    sorted.sort_unstable();
    if sorted.len() < MIN_TAIL {
        return Err(Error::InsufficientSamples {
            need: MIN_TAIL,
            got: sorted.len(),
        });
    }
    if sorted.first() == sorted.last() {
        return Err(Error::DegenerateFit(
            "all samples are equal; no slope to estimate".into(),
        ));
    }
    match x_min {
        XMin::Fixed(x) => {
            if x == 0 {
                return Err(Error::InvalidParameter {
                    field: "x_min",
                    msg: "must be at least 1".into(),
                });
            }
            fit_tail(&sorted, x)
        }
        XMin::Auto => {
            let mut candidates: Vec<u64> = sorted.clone();
            candidates.dedup();
            let mut best: Option<PowerLawFit> = None;
            for &x in &candidates {
                let Ok(fit) = fit_tail(&sorted, x) else { continue };
                let better = match &best {
                    None => true,
                    Some(b) => fit.ks_statistic < b.ks_statistic,
                };
                if better {
                    best = Some(fit);
                }
            }
            best.ok_or_else(|| Error::DegenerateFit("no cutoff leaves a fittable tail".into()))
        }
    }
}

/// The shifted-continuous closed form `1 + n / sum ln(x_i / (x_min - 0.5))`.
/// Cheap but biased for small `x_min`; used to seed the exact estimate.
pub fn closed_form_alpha(tail: &[u64], x_min: u64) -> f64 {
    let shift = x_min as f64 - 0.5;
    let log_sum: f64 = tail.iter().map(|&x| (x as f64 / shift).ln()).sum();
    1.0 + tail.len() as f64 / log_sum
}

fn fit_tail(sorted: &[u64], x_min: u64) -> Result<PowerLawFit> {
    let start = sorted.partition_point(|&x| x < x_min);
    let tail = &sorted[start..];
    let n = tail.len();
    if n < MIN_TAIL {
        return Err(Error::InsufficientSamples { need: MIN_TAIL, got: n });
    }
    if tail.first() == tail.last() {
        return Err(Error::DegenerateFit(
            "tail is constant; no slope to estimate".into(),
        ));
    }

    let mean_ln: f64 = tail.iter().map(|&x| (x as f64).ln()).sum::<f64>() / n as f64;
    let alpha = solve_alpha(mean_ln, x_min, closed_form_alpha(tail, x_min));

    // Fitted tail CDF: P(X <= x) = 1 - zeta(alpha, x + 1) / zeta(alpha, x_min).
    let z_min = hurwitz_zeta(alpha, x_min as f64);
    let fitted = |x: u64| 1.0 - hurwitz_zeta(alpha, x as f64 + 1.0) / z_min;
    let mut ks: f64 = 0.0;
    let mut seen = 0usize;
    let mut i = 0usize;
    while i < n {
        let v = tail[i];
        let below = seen as f64 / n as f64;
        while i < n && tail[i] == v {
            i += 1;
        }
        seen = i;
        let at = seen as f64 / n as f64;
        ks = ks.max((at - fitted(v)).abs());
        let fitted_below = if v == x_min { 0.0 } else { fitted(v - 1) };
        ks = ks.max((below - fitted_below).abs());
    }

    Ok(PowerLawFit {
        alpha,
        x_min,
        ks_statistic: ks,
        n_tail: n,
    })
}

/// Root of `model_mean_ln(alpha) = mean_ln`. The model mean log is strictly
/// decreasing in alpha from +inf (alpha -> 1) to ln(x_min), so a root exists
/// whenever the tail is non-constant.
fn solve_alpha(mean_ln: f64, x_min: u64, seed: f64) -> f64 {
    let q = x_min as f64;
    let gap = |alpha: f64| model_mean_ln(alpha, q) - mean_ln;
    let mut lo = 1.0 + 1e-7;
    let mut hi = seed.clamp(1.5, 64.0);
    while gap(hi) > 0.0 && hi < 1e6 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `E[ln X]` under the discrete law, via `-d ln zeta(alpha, q) / d alpha`.
fn model_mean_ln(alpha: f64, q: f64) -> f64 {
    let h = 1e-6;
    -(hurwitz_zeta(alpha + h, q).ln() - hurwitz_zeta(alpha - h, q).ln()) / (2.0 * h)
}

/// Hurwitz zeta `sum_{k>=0} (q + k)^-alpha` for `alpha > 1`, by direct
/// summation plus an Euler-Maclaurin tail.
fn hurwitz_zeta(alpha: f64, q: f64) -> f64 {
    const HEAD: usize = 32;
    let mut sum = 0.0;
    for k in 0..HEAD {
        sum += (q + k as f64).powf(-alpha);
    }
    let m = q + HEAD as f64;
    sum += m.powf(1.0 - alpha) / (alpha - 1.0);
    sum += 0.5 * m.powf(-alpha);
    sum += alpha / 12.0 * m.powf(-alpha - 1.0);
    sum -= alpha * (alpha + 1.0) * (alpha + 2.0) / 720.0 * m.powf(-alpha - 3.0);
    sum
}
