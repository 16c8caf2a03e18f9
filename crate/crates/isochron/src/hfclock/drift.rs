//! Hypothesized nuclear-moment drift models and their inversion: age since
//! creation from a relaxation law, time until decay from a pre-decay
//! divergence law.

use thiserror::Error;

use crate::stats::t_quantile;

#[derive(Debug, Error, PartialEq)]
pub enum DriftError {
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("predecay model is undefined at t = {t_s} >= decay time {decay_time_s}")]
    PastDecay { t_s: f64, decay_time_s: f64 },
    #[error("{name} must be positive, got {value}")]
    BadParameter { name: &'static str, value: f64 },
    #[error("measured fraction {measured} outside (0, {amplitude}]: model excluded")]
    ModelExcluded { measured: f64, amplitude: f64 },
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("point {index} invalid: {message}")]
    BadPoint { index: usize, message: String },
    #[error("fit did not converge after {0} iterations")]
    NonConvergence(u32),
}

/// Fractional shift of the nuclear moment as a function of time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriftModel {
    None,
    /// A * exp(-t / tau): decays away from the creation epoch.
    Relaxation { amplitude: f64, tau_s: f64 },
    /// kappa / (t_d - t): diverges approaching the decay time.
    Predecay { kappa_s: f64, decay_time_s: f64 },
}

impl DriftModel {
    pub fn validate(&self) -> Result<(), DriftError> {
        match *self {
            DriftModel::None => Ok(()),
            DriftModel::Relaxation { amplitude, tau_s } => {
                if !(amplitude > 0.0) {
                    return Err(DriftError::BadParameter {
                        name: "amplitude",
                        value: amplitude,
                    });
                }
                if !(tau_s > 0.0) {
                    return Err(DriftError::BadParameter {
                        name: "tau_s",
                        value: tau_s,
                    });
                }
                Ok(())
            }
            DriftModel::Predecay {
                kappa_s,
                decay_time_s,
            } => {
                if !(kappa_s > 0.0) {
                    return Err(DriftError::BadParameter {
                        name: "kappa_s",
                        value: kappa_s,
                    });
                }
                if !(decay_time_s > 0.0) {
                    return Err(DriftError::BadParameter {
                        name: "decay_time_s",
                        value: decay_time_s,
                    });
                }
                Ok(())
            }
        }
    }
}

/// Fractional moment shift at time `t_s` since creation.
pub fn drift_fraction(model: &DriftModel, t_s: f64) -> Result<f64, DriftError> {
    if t_s < 0.0 {
        return Err(DriftError::NegativeTime(t_s));
    }
    match *model {
        DriftModel::None => Ok(0.0),
        DriftModel::Relaxation { amplitude, tau_s } => Ok(amplitude * (-t_s / tau_s).exp()),
        DriftModel::Predecay {
            kappa_s,
            decay_time_s,
        } => {
            if t_s >= decay_time_s {
                return Err(DriftError::PastDecay {
                    t_s,
                    decay_time_s,
                });
            }
            Ok(kappa_s / (decay_time_s - t_s))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgeEstimate {
    pub age_s: f64,
    /// 95% interval from propagating the measurement sigma through the
    /// monotone inverse; `hi_s` is infinite when measured - 1.96 sigma
    /// crosses zero.
    pub lo_s: f64,
    pub hi_s: f64,
}

const Z_95: f64 = 1.959963984540054;

/// Invert the relaxation law: t = tau * ln(A / measured).
pub fn estimate_age(
    amplitude: f64,
    tau_s: f64,
    measured: f64,
    sigma: f64,
) -> Result<AgeEstimate, DriftError> {
    DriftModel::Relaxation { amplitude, tau_s }.validate()?;
    if !(measured > 0.0) || measured > amplitude {
        return Err(DriftError::ModelExcluded {
            measured,
            amplitude,
        });
    }
    if sigma < 0.0 {
        return Err(DriftError::BadParameter {
            name: "sigma",
            value: sigma,
        });
    }
    let age = tau_s * (amplitude / measured).ln();
    let lo = tau_s * (amplitude / (measured + Z_95 * sigma)).ln();
    let hi = if measured - Z_95 * sigma > 0.0 {
        tau_s * (amplitude / (measured - Z_95 * sigma)).ln()
    } else {
        f64::INFINITY
    };
    Ok(AgeEstimate {
        age_s: age,
        lo_s: lo.max(0.0),
        hi_s: hi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayPrediction {
    pub decay_time_s: f64,
    pub sigma_s: f64,
    /// 95% interval using the t distribution with n-1 degrees of freedom.
    pub lo_s: f64,
    pub hi_s: f64,
    pub iterations: u32,
}

const MAX_FIT_ITERATIONS: u32 = 200;

/// Fit t_d in the model fraction(t) = kappa / (t_d - t) by damped
/// Gauss-Newton over a series of (t_s, measured fraction) points.
pub fn predict_decay_time(
    kappa_s: f64,
    points: &[(f64, f64)],
) -> Result<DecayPrediction, DriftError> {
    if !(kappa_s > 0.0) {
        return Err(DriftError::BadParameter {
            name: "kappa_s",
            value: kappa_s,
        });
    }
    if points.len() < 2 {
        return Err(DriftError::TooFewPoints {
            need: 2,
            got: points.len(),
        });
    }
    let mut t_max = f64::NEG_INFINITY;
    for (index, &(t, y)) in points.iter().enumerate() {
        if !t.is_finite() || !y.is_finite() || y <= 0.0 {
            return Err(DriftError::BadPoint {
                index,
                message: format!("(t = {t}, fraction = {y}) needs a finite positive fraction"),
            });
        }
        t_max = t_max.max(t);
    }

    let sse = |td: f64| -> f64 {
        points
            .iter()
            .map(|&(t, y)| {
                let r = y - kappa_s / (td - t);
                r * r
            })
            .sum()
    };

    // Seed from the latest point, which is closest to the divergence.
    let &(t_last, y_last) = points
        .iter()
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .unwrap();
    let mut td = t_last + kappa_s / y_last;
    let mut best_sse = sse(td);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_FIT_ITERATIONS {
        iterations += 1;
        let mut jr = 0.0;
        let mut jj = 0.0;
        for &(t, y) in points {
            let inv = 1.0 / (td - t);
            let m = kappa_s * inv;
            let jac = -kappa_s * inv * inv;
            jr += jac * (y - m);
            jj += jac * jac;
        }
        let mut step = jr / jj;
        // Keep t_d above every sample time; halve on overshoot or ascent.
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = td + step;
            if candidate > t_max {
                let candidate_sse = sse(candidate);
                if candidate_sse <= best_sse * (1.0 + 1e-15) {
                    td = candidate;
                    best_sse = candidate_sse;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted || step.abs() <= 1e-12 * td.abs() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(DriftError::NonConvergence(MAX_FIT_ITERATIONS));
    }

    let mut jj = 0.0;
    for &(t, _) in points {
        let inv = 1.0 / (td - t);
        let jac = -kappa_s * inv * inv;
        jj += jac * jac;
    }
    let dof = (points.len() - 1) as f64;
    let sigma = (best_sse / dof / jj).sqrt();
    let half_width = if sigma > 0.0 {
        t_quantile(0.975, dof) * sigma
    } else {
        0.0
    };
    Ok(DecayPrediction {
        decay_time_s: td,
        sigma_s: sigma,
        lo_s: td - half_width,
        hi_s: td + half_width,
        iterations,
    })
}
