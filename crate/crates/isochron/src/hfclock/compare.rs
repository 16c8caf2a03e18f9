//! New-vs-natural ensemble comparison and the measurement campaign that
//! feeds it: per-ion Ramsey fringes, per-ion frequency estimates, pooled
//! two-sample inference.

use rayon::prelude::*;
use thiserror::Error;

use super::drift::{drift_fraction, DriftError, DriftModel};
use super::estimate::{estimate_frequency, EstimateError};
use super::ramsey::{fringe_grid, simulate_fringe};
use super::{ClockError, HyperfineClockSpec, RamseyConfig};
use crate::rng::{stream, Domain};
use crate::stats::{ivw_mean, normal_quantile, StatsError};

#[derive(Debug, Error, PartialEq)]
pub enum CompareError {
    #[error("ensemble '{label}' needs >= 2 readings, got {got}")]
    TooFewReadings { label: &'static str, got: usize },
    #[error("ensemble '{label}' is degenerate: {source}")]
    Degenerate {
        label: &'static str,
        source: StatsError,
    },
    #[error("alpha must lie in (0, 1), got {0}")]
    BadAlpha(f64),
}

/// One per-ion frequency measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reading {
    pub ion: u32,
    /// Time since the ion's isotope was created, at measurement.
    pub epoch_s: f64,
    pub value_fractional: f64,
    pub sigma_fractional: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonResult {
    /// (nu_new - nu_natural) / nu0.
    pub delta_fractional: f64,
    pub sigma_fractional: f64,
    pub z_score: f64,
    pub alpha: f64,
    pub distinguishable: bool,
}

/// Inverse-variance pool each ensemble, difference the means, and test
/// |z| against the two-sided alpha quantile.
pub fn compare_ensembles(
    new: &[Reading],
    natural: &[Reading],
    alpha: f64,
) -> Result<ComparisonResult, CompareError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CompareError::BadAlpha(alpha));
    }
    let pool = |label: &'static str, readings: &[Reading]| {
        if readings.len() < 2 {
            return Err(CompareError::TooFewReadings {
                label,
                got: readings.len(),
            });
        }
        let values: Vec<f64> = readings.iter().map(|r| r.value_fractional).collect();
        let sigmas: Vec<f64> = readings.iter().map(|r| r.sigma_fractional).collect();
        ivw_mean(&values, &sigmas).map_err(|source| CompareError::Degenerate { label, source })
    };
    let (mean_new, se_new) = pool("new", new)?;
    let (mean_nat, se_nat) = pool("natural", natural)?;
    let delta = mean_new - mean_nat;
    let sigma = (se_new * se_new + se_nat * se_nat).sqrt();
    let z = if delta == 0.0 { 0.0 } else { delta / sigma };
    Ok(ComparisonResult {
        delta_fractional: delta,
        sigma_fractional: sigma,
        z_score: z,
        alpha,
        distinguishable: z.abs() > normal_quantile(1.0 - alpha / 2.0),
    })
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub spec: HyperfineClockSpec,
    /// Per-grid-point shot count lives in `ramsey.shots`.
    pub ramsey: RamseyConfig,
    pub grid_points: usize,
    /// Scan half-width as a fraction of the central-fringe half-width pi/T.
    pub grid_span: f64,
    pub ions_per_ensemble: u32,
    /// Net fractional frequency offset imposed on the new ensemble on top
    /// of whatever the drift model produces.
    pub injected_fractional_shift: f64,
    pub drift: DriftModel,
    pub new_age_s: f64,
    pub natural_age_s: f64,
    pub alpha: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum CampaignError {
    #[error("invalid clock or interrogation config: {0}")]
    Config(#[from] ClockError),
    #[error("drift model: {0}")]
    Drift(#[from] DriftError),
    #[error("{ensemble} ion {ion}: {source}")]
    Estimate {
        ensemble: &'static str,
        ion: u32,
        source: EstimateError,
    },
    #[error("comparison: {0}")]
    Compare(#[from] CompareError),
    #[error("need >= 2 ions per ensemble, got {0}")]
    TooFewIons(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOutcome {
    pub new_readings: Vec<Reading>,
    pub natural_readings: Vec<Reading>,
    pub comparison: ComparisonResult,
}

/// Simulate a full two-ensemble campaign. Each ion gets an independent,
/// reproducible RNG stream keyed by (ensemble domain, ion index).
pub fn run_campaign(config: &CampaignConfig, master_seed: u64) -> Result<CampaignOutcome, CampaignError> {
    config.spec.validate()?;
    config.ramsey.validate()?;
    config.drift.validate()?;
    if config.ions_per_ensemble < 2 {
        return Err(CampaignError::TooFewIons(config.ions_per_ensemble));
    }
    let offset_new = config.injected_fractional_shift
        + drift_fraction(&config.drift, config.new_age_s)?;
    let offset_nat = drift_fraction(&config.drift, config.natural_age_s)?;
    let grid = fringe_grid(config.ramsey.free_s, config.grid_points, config.grid_span);

    let measure = |domain: Domain,
                   ensemble: &'static str,
                   offset: f64,
                   age_s: f64|
     -> Result<Vec<Reading>, CampaignError> {
        (0..config.ions_per_ensemble)
            .into_par_iter()
            .map(|ion| {
                let mut rng = stream(master_seed, domain, ion);
                let fringe =
                    simulate_fringe(&config.spec, &config.ramsey, offset, &grid, &mut rng);
                let est = estimate_frequency(&config.spec, &config.ramsey, &fringe).map_err(
                    |source| CampaignError::Estimate {
                        ensemble,
                        ion,
                        source,
                    },
                )?;
                Ok(Reading {
                    ion,
                    epoch_s: age_s,
                    value_fractional: est.offset_fractional,
                    sigma_fractional: est.sigma_fractional,
                })
            })
            .collect()
    };

    let new_readings = measure(Domain::CampaignNew, "new", offset_new, config.new_age_s)?;
    let natural_readings = measure(
        Domain::CampaignNatural,
        "natural",
        offset_nat,
        config.natural_age_s,
    )?;
    let comparison = compare_ensembles(&new_readings, &natural_readings, config.alpha)?;
    Ok(CampaignOutcome {
        new_readings,
        natural_readings,
        comparison,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Normal};

    fn reading(ion: u32, value: f64, sigma: f64) -> Reading {
        Reading {
            ion,
            epoch_s: 0.0,
            value_fractional: value,
            sigma_fractional: sigma,
        }
    }

    #[test]
    fn injected_delta_gives_expected_z() {
        // Two readings per ensemble at sigma sqrt(2)e-13 pool to an
        // ensemble error of 1e-13; z = 1e-12 / sqrt(2) / 1e-13.
        let s = 2.0f64.sqrt() * 1e-13;
        let new: Vec<Reading> = (0..2).map(|i| reading(i, 1e-12, s)).collect();
        let nat: Vec<Reading> = (0..2).map(|i| reading(i, 0.0, s)).collect();
        let result = compare_ensembles(&new, &nat, 0.05).unwrap();
        let expect = 1e-12 / (2.0f64.sqrt() * 1e-13);
        assert!((result.z_score - expect).abs() < 1e-9, "{}", result.z_score);
        assert!((result.z_score - 7.07).abs() < 0.01);
        assert!(result.distinguishable);
    }

    #[test]
    fn identical_ensembles_give_zero() {
        let readings: Vec<Reading> = (0..5).map(|i| reading(i, 3.3e-13, 1e-13)).collect();
        let result = compare_ensembles(&readings, &readings, 0.05).unwrap();
        assert_eq!(result.delta_fractional, 0.0);
        assert_eq!(result.z_score, 0.0);
        assert!(!result.distinguishable);
    }

    #[test]
    fn degenerate_and_small_ensembles_error() {
        let good: Vec<Reading> = (0..3).map(|i| reading(i, 0.0, 1e-13)).collect();
        let one = vec![reading(0, 0.0, 1e-13)];
        assert_eq!(
            compare_ensembles(&one, &good, 0.05),
            Err(CompareError::TooFewReadings {
                label: "new",
                got: 1
            })
        );
        let degenerate: Vec<Reading> = (0..3).map(|i| reading(i, 0.0, 0.0)).collect();
        assert!(matches!(
            compare_ensembles(&good, &degenerate, 0.05),
            Err(CompareError::Degenerate {
                label: "natural",
                ..
            })
        ));
        assert_eq!(
            compare_ensembles(&good, &good, 1.5),
            Err(CompareError::BadAlpha(1.5))
        );
    }

    #[test]
    fn false_positive_rate_tracks_alpha() {
        let alpha = 0.05;
        let sigma = 1e-13;
        let mut hits = 0;
        let trials = 1000u32;
        for trial in 0..trials {
            let mut rng = stream(99, Domain::Trial, trial);
            let noise = Normal::new(0.0, sigma).unwrap();
            let draw = |rng: &mut rand_chacha::ChaCha8Rng, ion: u32| Reading {
                ion,
                epoch_s: 0.0,
                value_fractional: noise.sample(rng),
                sigma_fractional: sigma,
            };
            let new: Vec<Reading> = (0..4).map(|i| draw(&mut rng, i)).collect();
            let nat: Vec<Reading> = (0..4).map(|i| draw(&mut rng, i)).collect();
            if compare_ensembles(&new, &nat, alpha).unwrap().distinguishable {
                hits += 1;
            }
        }
        let rate = hits as f64 / trials as f64;
        assert!((rate - alpha).abs() < 0.02, "false positive rate {rate}");
    }

    #[test]
    fn campaign_is_deterministic_and_detects_large_shift() {
        let config = CampaignConfig {
            spec: HyperfineClockSpec::sr87_plus(),
            ramsey: RamseyConfig::pi_half(0.1, 1000.0, 2000),
            grid_points: 7,
            grid_span: 0.6,
            ions_per_ensemble: 3,
            injected_fractional_shift: 5e-11,
            drift: DriftModel::None,
            new_age_s: 0.0,
            natural_age_s: 0.0,
            alpha: 0.05,
        };
        let a = run_campaign(&config, 1234).unwrap();
        let b = run_campaign(&config, 1234).unwrap();
        assert_eq!(a, b);
        assert!(a.comparison.distinguishable);
        assert!(a.comparison.z_score > 5.0);
        // All six ions produced finite readings tagged by index.
        assert_eq!(a.new_readings.len(), 3);
        assert!(a
            .new_readings
            .iter()
            .enumerate()
            .all(|(i, r)| r.ion == i as u32));
        let c = run_campaign(&config, 4321).unwrap();
        assert_ne!(
            a.comparison.delta_fractional,
            c.comparison.delta_fractional
        );
    }

    #[test]
    fn campaign_drift_offsets_enter_the_new_ensemble() {
        // A relaxation drift at a young age shifts "new" but not an
        // ancient "natural" ensemble.
        let config = CampaignConfig {
            spec: HyperfineClockSpec::sr87_plus(),
            ramsey: RamseyConfig::pi_half(0.1, 1000.0, 50_000),
            grid_points: 7,
            grid_span: 0.6,
            ions_per_ensemble: 3,
            injected_fractional_shift: 0.0,
            drift: DriftModel::Relaxation {
                amplitude: 1e-10,
                tau_s: 1e9,
            },
            new_age_s: 0.0,
            natural_age_s: 1e14,
            alpha: 0.05,
        };
        let outcome = run_campaign(&config, 77).unwrap();
        // Expected delta is the full amplitude 1e-10.
        assert!(
            (outcome.comparison.delta_fractional - 1e-10).abs() < 2e-11,
            "{}",
            outcome.comparison.delta_fractional
        );
        assert!(outcome.comparison.distinguishable);
    }
}
