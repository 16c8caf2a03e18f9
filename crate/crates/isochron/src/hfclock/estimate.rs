//! Fringe-center frequency estimation and shot budgeting.

use thiserror::Error;

use super::{ramsey::ramsey_probability, FringeData, HyperfineClockSpec, RamseyConfig};

#[derive(Debug, Error, PartialEq)]
pub enum EstimateError {
    #[error("need at least {need} fringe points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("fit landed at {shift_rad_s} rad/s, outside the central fringe (|shift| <= {limit_rad_s})")]
    FringeAmbiguity { shift_rad_s: f64, limit_rad_s: f64 },
    #[error("no convergence after {0} iterations")]
    NonConvergence(u32),
    #[error("fringe carries no frequency information (flat or empty counts)")]
    NoInformation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    /// (nu_measured - nu0) / nu0.
    pub offset_fractional: f64,
    /// Standard error of the offset, from the Fisher information of the fit.
    pub sigma_fractional: f64,
    pub iterations: u32,
}

const MAX_ITERATIONS: u32 = 100;

/// Weighted nonlinear least-squares fit of the Ramsey model to a scanned
/// fringe, with the line shift as the single free parameter. Seeded by a
/// three-point parabola through the count maximum; binomial weights are
/// refreshed each Fisher-scoring step.
pub fn estimate_frequency(
    spec: &HyperfineClockSpec,
    config: &RamseyConfig,
    fringe: &FringeData,
) -> Result<Estimate, EstimateError> {
    let n = fringe.detunings_rad_s.len();
    if n < 5 || fringe.successes.len() != n {
        return Err(EstimateError::TooFewPoints { need: 5, got: n });
    }
    let shots = fringe.shots_per_point as f64;
    let y: Vec<f64> = fringe.successes.iter().map(|&s| s as f64 / shots).collect();
    let x = &fringe.detunings_rad_s;

    let model = |s: f64, d: f64| {
        let p = ramsey_probability(config, d - s);
        match &config.detection {
            Some(det) => det.observed_probability(p),
            None => p,
        }
    };

    let limit = std::f64::consts::PI / config.free_s;
    let mut s = parabola_seed(x, &y);
    if s.abs() > limit {
        return Err(EstimateError::FringeAmbiguity {
            shift_rad_s: s,
            limit_rad_s: limit,
        });
    }

    let h = 1e-5 * limit;
    let mut information = 0.0;
    let mut converged = None;
    for iteration in 1..=MAX_ITERATIONS {
        let mut num = 0.0;
        let mut den = 0.0;
        for (&xi, &yi) in x.iter().zip(&y) {
            let m = model(s, xi);
            let g = (model(s + h, xi) - model(s - h, xi)) / (2.0 * h);
            let w = shots / (m * (1.0 - m)).max(1e-12);
            num += w * (yi - m) * g;
            den += w * g * g;
        }
        if !(den > 0.0) || !den.is_finite() {
            return Err(EstimateError::NoInformation);
        }
        let step = num / den;
        s += step;
        information = den;
        // The fit cannot resolve better than 1/sqrt(den); below a millionth
        // of that the step is finite-difference roundoff, not signal, and at
        // high shot counts that noise floor sits above any fixed tolerance.
        let tol = (1e-12 * s.abs().max(1.0 / config.free_s)).max(1e-6 / den.sqrt());
        if step.abs() <= tol {
            converged = Some(iteration);
            break;
        }
    }
    let iterations = converged.ok_or(EstimateError::NonConvergence(MAX_ITERATIONS))?;
    if s.abs() > limit {
        return Err(EstimateError::FringeAmbiguity {
            shift_rad_s: s,
            limit_rad_s: limit,
        });
    }
    let to_fractional = 1.0 / (2.0 * std::f64::consts::PI * spec.nu0_hz);
    Ok(Estimate {
        offset_fractional: s * to_fractional,
        sigma_fractional: information.powf(-0.5) * to_fractional,
        iterations,
    })
}

/// Vertex of the quadratic through the count maximum and its neighbors.
fn parabola_seed(x: &[f64], y: &[f64]) -> f64 {
    let mut im = 0;
    for (i, &v) in y.iter().enumerate() {
        if v > y[im] {
            im = i;
        }
    }
    let i = im.clamp(1, x.len() - 2);
    let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    let d1 = (y1 - y0) / (x1 - x0);
    let d2 = (y2 - y1) / (x2 - x1);
    let curvature = (d2 - d1) / (x2 - x0);
    if !(curvature < 0.0) {
        return x[im];
    }
    0.5 * (x0 + x1) - d1 / (2.0 * curvature)
}

/// Shots needed so quantum projection noise sigma = 1/(2 pi T sqrt(N))
/// reaches the target fractional resolution on nu0.
pub fn required_shots(target_sigma_fractional: f64, nu0_hz: f64, free_s: f64) -> u64 {
    assert!(
        target_sigma_fractional > 0.0 && nu0_hz > 0.0 && free_s > 0.0,
        "required_shots arguments must be positive"
    );
    let x = 1.0 / (2.0 * std::f64::consts::PI * free_s * nu0_hz * target_sigma_fractional);
    // Guard the exact single-shot boundary against one-ulp overshoot.
    ((x * x) - 1e-9).ceil().max(1.0) as u64
}

/// Hyperfine splitting scales linearly with the nuclear moment.
pub fn moment_to_frequency(spec: &HyperfineClockSpec, moment_ratio: f64) -> f64 {
    assert!(moment_ratio > 0.0, "moment ratio must be positive");
    spec.nu0_hz * moment_ratio
}
