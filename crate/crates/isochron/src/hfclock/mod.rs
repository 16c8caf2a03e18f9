//! Hyperfine-clock simulation: Ramsey interrogation, shot-noise frequency
//! estimation, nuclear-moment drift models, and the new-vs-natural isotope
//! comparison campaign.

pub mod compare;
pub mod drift;
pub mod estimate;
pub mod ramsey;

pub use compare::{
    compare_ensembles, run_campaign, CampaignConfig, CampaignOutcome, CompareError,
    ComparisonResult, Reading,
};
pub use drift::{
    drift_fraction, estimate_age, predict_decay_time, AgeEstimate, DecayPrediction, DriftError,
    DriftModel,
};
pub use estimate::{
    estimate_frequency, moment_to_frequency, required_shots, Estimate, EstimateError,
};
pub use ramsey::{
    analytic_fringe, fringe_grid, half_max_detuning, ramsey_probability, simulate_fringe,
    FringeData,
};

use thiserror::Error;

use crate::nuclide::NuclideId;
use crate::stats::{poisson_ge, poisson_lt};

#[derive(Debug, Error, PartialEq)]
pub enum ClockError {
    #[error("nu0 must be positive, got {0}")]
    BadNu0(f64),
    #[error("expected f_upper = f_lower + 1 for a ground-state microwave clock, got {lower} -> {upper}")]
    BadHyperfinePair { lower: u32, upper: u32 },
    #[error("{name} must be positive, got {value}")]
    BadTime { name: &'static str, value: f64 },
    #[error("shots must be >= 1")]
    NoShots,
    #[error("pulse area {area_rad} rad is not pi/2 within {tolerance_rad} rad")]
    PulseAreaOff { area_rad: f64, tolerance_rad: f64 },
    #[error("detection bright mean {bright} must exceed dark mean {dark}")]
    BadDetectionMeans { bright: f64, dark: f64 },
    #[error("detection threshold must be >= 1")]
    BadThreshold,
}

/// The transition under interrogation.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperfineClockSpec {
    pub nuclide: NuclideId,
    /// Unperturbed hyperfine splitting in Hz.
    pub nu0_hz: f64,
    pub f_lower: u32,
    pub f_upper: u32,
    /// Metadata: state-preparation / detection wavelengths.
    pub pump_nm: Option<f64>,
    pub detect_nm: Option<f64>,
}

impl HyperfineClockSpec {
    pub fn validate(&self) -> Result<(), ClockError> {
        if !(self.nu0_hz > 0.0) || !self.nu0_hz.is_finite() {
            return Err(ClockError::BadNu0(self.nu0_hz));
        }
        if self.f_upper != self.f_lower + 1 {
            return Err(ClockError::BadHyperfinePair {
                lower: self.f_lower,
                upper: self.f_upper,
            });
        }
        Ok(())
    }

    /// Sr-87+ ground-state splitting, F=4 -> F=5, near 5 GHz.
    pub fn sr87_plus() -> Self {
        HyperfineClockSpec {
            nuclide: NuclideId::parse("Sr-87").unwrap(),
            nu0_hz: 5.0e9,
            f_lower: 4,
            f_upper: 5,
            pump_nm: Some(422.0),
            detect_nm: Some(408.0),
        }
    }

    /// Hg-199+ ground-state splitting, F=0 -> F=1, 40.5 GHz.
    pub fn hg199_plus() -> Self {
        HyperfineClockSpec {
            nuclide: NuclideId::parse("Hg-199").unwrap(),
            nu0_hz: 4.05e10,
            f_lower: 0,
            f_upper: 1,
            pump_nm: Some(194.0),
            detect_nm: Some(194.0),
        }
    }
}

/// Poisson-count state readout with a hard threshold: counts >= threshold
/// reads "bright" (upper state).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub bright_mean: f64,
    pub dark_mean: f64,
    pub threshold: u64,
}

impl Detection {
    pub fn validate(&self) -> Result<(), ClockError> {
        if !(self.bright_mean > self.dark_mean) || self.dark_mean < 0.0 {
            return Err(ClockError::BadDetectionMeans {
                bright: self.bright_mean,
                dark: self.dark_mean,
            });
        }
        if self.threshold == 0 {
            return Err(ClockError::BadThreshold);
        }
        Ok(())
    }

    /// P(bright state reads dark).
    pub fn bright_miss(&self) -> f64 {
        poisson_lt(self.threshold, self.bright_mean)
    }

    /// P(dark state reads bright).
    pub fn dark_false(&self) -> f64 {
        if self.dark_mean == 0.0 {
            0.0
        } else {
            poisson_ge(self.threshold, self.dark_mean)
        }
    }

    /// Probability of observing "bright" given the true excitation
    /// probability; misclassification folds into the fringe contrast.
    pub fn observed_probability(&self, p_excited: f64) -> f64 {
        let miss = self.bright_miss();
        let ghost = self.dark_false();
        p_excited * (1.0 - miss) + (1.0 - p_excited) * ghost
    }

    /// Draw one readout's photon count for an ion in the given state.
    pub fn sample_counts(&self, in_upper: bool, rng: &mut impl rand::Rng) -> u64 {
        let mean = if in_upper {
            self.bright_mean
        } else {
            self.dark_mean
        };
        if mean <= 0.0 {
            return 0;
        }
        use rand_distr::Distribution;
        rand_distr::Poisson::new(mean).unwrap().sample(rng) as u64
    }

    pub fn classify(&self, counts: u64) -> bool {
        counts >= self.threshold
    }
}

/// Two-pulse Ramsey interrogation parameters. `shots` counts repetitions
/// per grid point when a fringe is scanned.
#[derive(Debug, Clone, PartialEq)]
pub struct RamseyConfig {
    /// Rabi angular frequency (rad/s).
    pub rabi_rad_s: f64,
    /// Single-pulse duration tau (s).
    pub pulse_s: f64,
    /// Free-evolution time T (s).
    pub free_s: f64,
    pub shots: u64,
    /// None = ideal projective readout.
    pub detection: Option<Detection>,
}

/// Accepted deviation of the pulse area from pi/2 (rad).
pub const PULSE_AREA_TOLERANCE_RAD: f64 = 0.05;

impl RamseyConfig {
    /// Standard sequence: pi/2 pulses of duration `free_s / pulse_divider`.
    pub fn pi_half(free_s: f64, pulse_divider: f64, shots: u64) -> Self {
        let pulse_s = free_s / pulse_divider;
        RamseyConfig {
            rabi_rad_s: std::f64::consts::FRAC_PI_2 / pulse_s,
            pulse_s,
            free_s,
            shots,
            detection: None,
        }
    }

    pub fn validate(&self) -> Result<(), ClockError> {
        for (name, value) in [
            ("rabi_rad_s", self.rabi_rad_s),
            ("pulse_s", self.pulse_s),
            ("free_s", self.free_s),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ClockError::BadTime { name, value });
            }
        }
        if self.shots == 0 {
            return Err(ClockError::NoShots);
        }
        let area = self.rabi_rad_s * self.pulse_s;
        if (area - std::f64::consts::FRAC_PI_2).abs() > PULSE_AREA_TOLERANCE_RAD {
            return Err(ClockError::PulseAreaOff {
                area_rad: area,
                tolerance_rad: PULSE_AREA_TOLERANCE_RAD,
            });
        }
        if let Some(d) = &self.detection {
            d.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(HyperfineClockSpec::sr87_plus().validate().is_ok());
        assert!(HyperfineClockSpec::hg199_plus().validate().is_ok());
        let mut bad = HyperfineClockSpec::sr87_plus();
        bad.f_upper = 6;
        assert_eq!(
            bad.validate(),
            Err(ClockError::BadHyperfinePair { lower: 4, upper: 6 })
        );
        bad = HyperfineClockSpec::sr87_plus();
        bad.nu0_hz = 0.0;
        assert_eq!(bad.validate(), Err(ClockError::BadNu0(0.0)));
    }

    #[test]
    fn ramsey_config_validation() {
        let good = RamseyConfig::pi_half(0.1, 100.0, 500);
        assert!(good.validate().is_ok());
        assert!((good.rabi_rad_s * good.pulse_s - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let mut off = good.clone();
        off.rabi_rad_s *= 1.2;
        assert!(matches!(
            off.validate(),
            Err(ClockError::PulseAreaOff { .. })
        ));
        let mut none = good.clone();
        none.shots = 0;
        assert_eq!(none.validate(), Err(ClockError::NoShots));
    }

    #[test]
    fn detection_misclassification_tails() {
        let d = Detection {
            bright_mean: 5.9,
            dark_mean: 0.1,
            threshold: 2,
        };
        d.validate().unwrap();
        assert!((d.bright_miss() - 0.0189).abs() < 2e-4);
        assert!((d.dark_false() - 0.0047).abs() < 2e-4);
        // Contrast folding: p=1 loses the miss, p=0 gains the ghost.
        assert!((d.observed_probability(1.0) - (1.0 - d.bright_miss())).abs() < 1e-15);
        assert!((d.observed_probability(0.0) - d.dark_false()).abs() < 1e-15);
        let ideal = Detection {
            bright_mean: 100.0,
            dark_mean: 0.0,
            threshold: 10,
        };
        assert_eq!(ideal.dark_false(), 0.0);
    }
}
