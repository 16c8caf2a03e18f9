//! Shared statistics plumbing: weighted line fits, KS distances, Poisson
//! tails, and distribution quantiles. Distribution functions come from
//! statrs; only the fitting logic lives here.

use statrs::distribution::{ContinuousCDF, DiscreteCDF, Normal, Poisson, StudentsT};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("input arrays have mismatched lengths")]
    LengthMismatch,
    #[error("sigma must be positive and finite, got {0}")]
    BadSigma(f64),
    #[error("design is degenerate: all abscissae equal")]
    DegenerateDesign,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n-1 denominator).
pub fn sample_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WlsLine {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
}

/// Weighted least-squares straight line with per-point standard deviations.
/// Standard errors come from the known sigmas, not from residuals.
pub fn wls_line(x: &[f64], y: &[f64], sigma: &[f64]) -> Result<WlsLine, StatsError> {
    if x.len() != y.len() || x.len() != sigma.len() {
        return Err(StatsError::LengthMismatch);
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewPoints {
            need: 2,
            got: x.len(),
        });
    }
    for &s in sigma {
        if !(s > 0.0) || !s.is_finite() {
            return Err(StatsError::BadSigma(s));
        }
    }
    let mut sw = 0.0;
    let mut swx = 0.0;
    let mut swy = 0.0;
    for ((&xi, &yi), &si) in x.iter().zip(y).zip(sigma) {
        let w = 1.0 / (si * si);
        sw += w;
        swx += w * xi;
        swy += w * yi;
    }
    let xbar = swx / sw;
    // Center the abscissa so the normal equations do not cancel.
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for ((&xi, &yi), &si) in x.iter().zip(y).zip(sigma) {
        let w = 1.0 / (si * si);
        let d = xi - xbar;
        sxx += w * d * d;
        sxy += w * d * yi;
    }
    if sxx <= 0.0 {
        return Err(StatsError::DegenerateDesign);
    }
    let slope = sxy / sxx;
    let intercept = (swy - slope * swx) / sw;
    let slope_var = 1.0 / sxx;
    let intercept_var = 1.0 / sw + xbar * xbar * slope_var;
    Ok(WlsLine {
        slope,
        intercept,
        slope_se: slope_var.sqrt(),
        intercept_se: intercept_var.sqrt(),
    })
}

/// Kolmogorov-Smirnov distance of samples (already mapped through the
/// hypothesized CDF, so values lie in [0,1]) from Uniform(0,1).
pub fn ks_distance_uniform(u: &[f64]) -> f64 {
    let mut sorted = u.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &ui) in sorted.iter().enumerate() {
        let hi = (i as f64 + 1.0) / n - ui;
        let lo = ui - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}

/// P(X < k) for X ~ Poisson(mean).
pub fn poisson_lt(k: u64, mean: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    Poisson::new(mean).expect("poisson mean > 0").cdf(k - 1)
}

/// P(X >= k) for X ~ Poisson(mean).
pub fn poisson_ge(k: u64, mean: f64) -> f64 {
    1.0 - poisson_lt(k, mean)
}

pub fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().inverse_cdf(p)
}

pub fn t_quantile(p: f64, dof: f64) -> f64 {
    StudentsT::new(0.0, 1.0, dof)
        .expect("dof > 0")
        .inverse_cdf(p)
}

/// Inverse-variance-weighted mean and its standard error.
pub fn ivw_mean(values: &[f64], sigmas: &[f64]) -> Result<(f64, f64), StatsError> {
    if values.len() != sigmas.len() {
        return Err(StatsError::LengthMismatch);
    }
    if values.is_empty() {
        return Err(StatsError::TooFewPoints { need: 1, got: 0 });
    }
    let mut sw = 0.0;
    let mut swv = 0.0;
    for (&v, &s) in values.iter().zip(sigmas) {
        if !(s > 0.0) || !s.is_finite() {
            return Err(StatsError::BadSigma(s));
        }
        let w = 1.0 / (s * s);
        sw += w;
        swv += w * v;
    }
    Ok((swv / sw, (1.0 / sw).sqrt()))
}
