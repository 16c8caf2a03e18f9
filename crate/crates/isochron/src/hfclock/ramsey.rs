//! Two-pulse Ramsey transition probability and fringe synthesis.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::{HyperfineClockSpec, RamseyConfig};

/// Full two-pulse Ramsey transition probability at a given detuning
/// (rad/s): P = 4 (W/W')^2 sin^2(W't/2) [cos(W't/2) cos(dT/2)
///              - (d/W') sin(W't/2) sin(dT/2)]^2,  W' = sqrt(W^2 + d^2).
pub fn ramsey_probability(config: &RamseyConfig, detuning_rad_s: f64) -> f64 {
    let omega = config.rabi_rad_s;
    let d = detuning_rad_s;
    let op2 = omega * omega + d * d;
    if op2 == 0.0 {
        return 0.0;
    }
    let op = op2.sqrt();
    let (sp, cp) = (0.5 * op * config.pulse_s).sin_cos();
    let (sf, cf) = (0.5 * d * config.free_s).sin_cos();
    let bracket = cp * cf - (d / op) * sp * sf;
    let p = 4.0 * (omega * omega / op2) * sp * sp * bracket * bracket;
    p.clamp(0.0, 1.0)
}

/// Uniform detuning grid (rad/s) across the central fringe:
/// `points` values spanning +/- span_fraction * pi / free_s.
pub fn fringe_grid(free_s: f64, points: usize, span_fraction: f64) -> Vec<f64> {
    assert!(points >= 2 && span_fraction > 0.0);
    let half = span_fraction * std::f64::consts::PI / free_s;
    (0..points)
        .map(|i| -half + 2.0 * half * i as f64 / (points - 1) as f64)
        .collect()
}

/// Observed bright probability at each detuning for an ion whose true
/// resonance sits at nu0 * (1 + offset); detection misclassification is
/// folded in when configured.
pub fn analytic_fringe(
    spec: &HyperfineClockSpec,
    config: &RamseyConfig,
    offset_fractional: f64,
    detunings_rad_s: &[f64],
) -> Vec<f64> {
    let shift = 2.0 * std::f64::consts::PI * spec.nu0_hz * offset_fractional;
    detunings_rad_s
        .iter()
        .map(|&d| {
            let p = ramsey_probability(config, d - shift);
            match &config.detection {
                Some(det) => det.observed_probability(p),
                None => p,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FringeData {
    pub detunings_rad_s: Vec<f64>,
    pub successes: Vec<u64>,
    pub shots_per_point: u64,
}

/// Sample a fringe scan: per point, true excitations are binomial in the
/// Ramsey probability, then each readout is misclassified through the
/// Poisson threshold channel when detection is configured.
pub fn simulate_fringe(
    spec: &HyperfineClockSpec,
    config: &RamseyConfig,
    offset_fractional: f64,
    detunings_rad_s: &[f64],
    rng: &mut impl Rng,
) -> FringeData {
    let shift = 2.0 * std::f64::consts::PI * spec.nu0_hz * offset_fractional;
    let shots = config.shots;
    let successes = detunings_rad_s
        .iter()
        .map(|&d| {
            let p = ramsey_probability(config, d - shift);
            let excited = Binomial::new(shots, p).unwrap().sample(rng);
            match &config.detection {
                None => excited,
                Some(det) => {
                    let kept = draw_binomial(excited, 1.0 - det.bright_miss(), rng);
                    let ghosts = draw_binomial(shots - excited, det.dark_false(), rng);
                    kept + ghosts
                }
            }
        })
        .collect();
    FringeData {
        detunings_rad_s: detunings_rad_s.to_vec(),
        successes,
        shots_per_point: shots,
    }
}

fn draw_binomial(n: u64, p: f64, rng: &mut impl Rng) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).unwrap().sample(rng)
}

/// Locate the positive half-maximum detuning of the central fringe by
/// bisection; the fringe FWHM is twice this value.
pub fn half_max_detuning(config: &RamseyConfig) -> f64 {
    let peak = ramsey_probability(config, 0.0);
    let target = 0.5 * peak;
    // The first minimum of the central fringe lies within pi/T_eff < pi/T
    // of resonance for near-ideal pulses; bracket on [0, pi/T].
    let mut lo = 0.0f64;
    let mut hi = std::f64::consts::PI / config.free_s;
    debug_assert!(ramsey_probability(config, hi) < target);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ramsey_probability(config, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
