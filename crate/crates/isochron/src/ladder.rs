//! Three-level ladder Monte Carlo: an ion parked in the long-lived e1
//! state is probed on the e1 -> e2 clock transition at a Zeno-safe rate
//! until e1 decays. Produces telegraph-style decay records, an aging
//! regression on the probe frequencies, and a memoryless-decay test.

use rand_distr::{Distribution, Exp, Normal};
use rayon::prelude::*;
use thiserror::Error;

use crate::hfclock::Detection;
use crate::rng::{stream, Domain};
use crate::stats::{ks_distance_uniform, normal_quantile, wls_line, StatsError};

#[derive(Debug, Error, PartialEq)]
pub enum LadderError {
    #[error("{name} must be positive, got {value}")]
    BadParameter { name: &'static str, value: f64 },
    #[error("lifetime_e1_s ({e1}) must exceed lifetime_e2_s ({e2})")]
    LifetimeOrder { e1: f64, e2: f64 },
    #[error("probe perturbation {0} must lie in [0, 1)")]
    BadPerturbation(f64),
    #[error(
        "Zeno budget violated: interval {interval_s} s gives probe hazard above 1% of natural; minimum interval {minimum_s} s"
    )]
    ZenoBudget { interval_s: f64, minimum_s: f64 },
    #[error("need at least {need} probes across runs, got {got}")]
    TooFewProbes { need: usize, got: usize },
    #[error("aging slope unidentifiable: {0}")]
    Unidentifiable(StatsError),
    #[error("need at least {need} decay times, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("decay time at index {index} is not positive: {value}")]
    NonPositiveDecayTime { index: usize, value: f64 },
}

/// Readout channel for the in-e1 telegraph: counts per probe window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderDetection {
    pub cycling_rate_per_s: f64,
    pub collection_efficiency: f64,
    pub window_s: f64,
    pub dark_mean: f64,
    pub threshold: u64,
}

impl LadderDetection {
    /// Hg-199+-style defaults: 5.9e7 /s cycling, 1e-3 collection, 100 us
    /// window -> bright mean 5.9 counts against 0.1 dark.
    pub fn hg199_defaults() -> Self {
        LadderDetection {
            cycling_rate_per_s: 5.9e7,
            collection_efficiency: 1e-3,
            window_s: 1e-4,
            dark_mean: 0.1,
            threshold: 2,
        }
    }

    pub fn bright_mean(&self) -> f64 {
        self.cycling_rate_per_s * self.collection_efficiency * self.window_s
    }

    pub fn thresholded(&self) -> Detection {
        Detection {
            bright_mean: self.bright_mean(),
            dark_mean: self.dark_mean,
            threshold: self.threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpLadderConfig {
    pub lifetime_e1_s: f64,
    pub lifetime_e2_s: f64,
    pub probe_interval_s: f64,
    /// Per-probe induced decay probability epsilon.
    pub probe_perturbation: f64,
    pub detection: LadderDetection,
    /// Fractional Clock-2 frequency drift per second spent in e1.
    pub aging_beta_per_s: f64,
    /// Per-probe frequency-estimate standard deviation (fractional).
    pub probe_sigma_fractional: f64,
    /// Probing stops here even if the ion is still in e1.
    pub horizon_s: f64,
    /// Optional hazard-modification hook (see module notes); 1.0 leaves
    /// the memoryless null intact.
    pub hazard_factor: f64,
}

impl JumpLadderConfig {
    pub fn validate(&self) -> Result<(), LadderError> {
        for (name, value) in [
            ("lifetime_e1_s", self.lifetime_e1_s),
            ("lifetime_e2_s", self.lifetime_e2_s),
            ("probe_interval_s", self.probe_interval_s),
            ("probe_sigma_fractional", self.probe_sigma_fractional),
            ("horizon_s", self.horizon_s),
            ("hazard_factor", self.hazard_factor),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(LadderError::BadParameter { name, value });
            }
        }
        if self.lifetime_e1_s <= self.lifetime_e2_s {
            return Err(LadderError::LifetimeOrder {
                e1: self.lifetime_e1_s,
                e2: self.lifetime_e2_s,
            });
        }
        if !(0.0..1.0).contains(&self.probe_perturbation) {
            return Err(LadderError::BadPerturbation(self.probe_perturbation));
        }
        Ok(())
    }

    /// Total e1 departure hazard: natural plus probe-induced.
    pub fn effective_hazard_per_s(&self) -> f64 {
        (1.0 / self.lifetime_e1_s + self.probe_perturbation / self.probe_interval_s)
            * self.hazard_factor
    }
}

/// Uniform probe times. Errors when the probe-induced hazard
/// epsilon/interval exceeds 1% of the natural hazard 1/lifetime_e1.
pub fn make_schedule(config: &JumpLadderConfig) -> Result<Vec<f64>, LadderError> {
    config.validate()?;
    if config.probe_perturbation > 0.0 {
        let minimum = config.probe_perturbation * config.lifetime_e1_s / 0.01;
        if config.probe_interval_s < minimum {
            return Err(LadderError::ZenoBudget {
                interval_s: config.probe_interval_s,
                minimum_s: minimum,
            });
        }
    }
    let mut times = Vec::new();
    let mut k = 1u64;
    loop {
        let t = k as f64 * config.probe_interval_s;
        if t > config.horizon_s * (1.0 + 1e-12) {
            break;
        }
        times.push(t);
        k += 1;
    }
    Ok(times)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRecord {
    pub t_s: f64,
    /// Clock-2 fractional frequency estimate at this probe.
    pub freq_fractional: f64,
    pub sigma_fractional: f64,
    pub counts: u64,
    pub read_bright: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpRun {
    pub run: u32,
    pub seed: u64,
    pub probes: Vec<ProbeRecord>,
    pub decay_time_s: f64,
}

/// One telegraph run: draw the e1 survival time, then walk the schedule
/// while the ion is still shelved.
pub fn simulate_run(
    config: &JumpLadderConfig,
    master_seed: u64,
    run: u32,
) -> Result<JumpRun, LadderError> {
    let schedule = make_schedule(config)?;
    let mut rng = stream(master_seed, Domain::LadderRun, run);
    let decay_time_s = Exp::new(config.effective_hazard_per_s())
        .unwrap()
        .sample(&mut rng);
    let noise = Normal::new(0.0, config.probe_sigma_fractional).unwrap();
    let thresholded = config.detection.thresholded();
    let probes = schedule
        .into_iter()
        .take_while(|&t| t < decay_time_s)
        .map(|t| {
            let freq = config.aging_beta_per_s * t + noise.sample(&mut rng);
            let counts = thresholded.sample_counts(true, &mut rng);
            ProbeRecord {
                t_s: t,
                freq_fractional: freq,
                sigma_fractional: config.probe_sigma_fractional,
                counts,
                read_bright: thresholded.classify(counts),
            }
        })
        .collect();
    Ok(JumpRun {
        run,
        seed: master_seed,
        probes,
        decay_time_s,
    })
}

/// Simulate `count` independent runs (parallel, order-stable).
pub fn simulate_runs(
    config: &JumpLadderConfig,
    master_seed: u64,
    count: u32,
) -> Result<Vec<JumpRun>, LadderError> {
    make_schedule(config)?;
    (0..count)
        .into_par_iter()
        .map(|run| simulate_run(config, master_seed, run))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgingReport {
    pub beta_per_s: f64,
    pub sigma: f64,
    pub z: f64,
    /// 95% confidence bounds on beta.
    pub lo: f64,
    pub hi: f64,
    pub probes: usize,
}

/// Pooled weighted regression of probe frequency on time-in-e1 across runs.
pub fn detect_aging(runs: &[JumpRun]) -> Result<AgingReport, LadderError> {
    let mut t = Vec::new();
    let mut y = Vec::new();
    let mut s = Vec::new();
    for run in runs {
        for p in &run.probes {
            t.push(p.t_s);
            y.push(p.freq_fractional);
            s.push(p.sigma_fractional);
        }
    }
    if t.len() < 2 {
        return Err(LadderError::TooFewProbes {
            need: 2,
            got: t.len(),
        });
    }
    let fit = wls_line(&t, &y, &s).map_err(LadderError::Unidentifiable)?;
    let z = fit.slope / fit.slope_se;
    let half = normal_quantile(0.975) * fit.slope_se;
    Ok(AgingReport {
        beta_per_s: fit.slope,
        sigma: fit.slope_se,
        z,
        lo: fit.slope - half,
        hi: fit.slope + half,
        probes: t.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemorylessReport {
    pub ks_statistic: f64,
    pub p_value: f64,
    /// Maximum-likelihood exponential rate of the sample.
    pub lambda_per_s: f64,
    pub samples: usize,
    pub bootstrap: u32,
}

fn ks_against_exponential(times: &[f64], lambda: f64) -> f64 {
    let u: Vec<f64> = times.iter().map(|&t| -(-lambda * t).exp_m1()).collect();
    ks_distance_uniform(&u)
}

/// Kolmogorov-Smirnov test of the decay times against an exponential with
/// ML-fitted rate; the null distribution of the statistic (rate re-fitted
/// per resample, Lilliefors-style) comes from a parametric bootstrap.
pub fn test_memoryless(
    decay_times: &[f64],
    bootstrap: u32,
    seed: u64,
) -> Result<MemorylessReport, LadderError> {
    if decay_times.len() < 10 {
        return Err(LadderError::TooFewSamples {
            need: 10,
            got: decay_times.len(),
        });
    }
    for (index, &t) in decay_times.iter().enumerate() {
        if !(t > 0.0) || !t.is_finite() {
            return Err(LadderError::NonPositiveDecayTime { index, value: t });
        }
    }
    let n = decay_times.len();
    let lambda = n as f64 / decay_times.iter().sum::<f64>();
    let observed = ks_against_exponential(decay_times, lambda);

    let exceed: u32 = (0..bootstrap)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, Domain::Bootstrap, b);
            let exp = Exp::new(lambda).unwrap();
            let resample: Vec<f64> = (0..n).map(|_| exp.sample(&mut rng)).collect();
            let refit = n as f64 / resample.iter().sum::<f64>();
            u32::from(ks_against_exponential(&resample, refit) >= observed)
        })
        .sum();
    Ok(MemorylessReport {
        ks_statistic: observed,
        p_value: (1.0 + exceed as f64) / (bootstrap as f64 + 1.0),
        lambda_per_s: lambda,
        samples: n,
        bootstrap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{mean, sample_std};
    use rand_distr::Weibull;

    fn base_config() -> JumpLadderConfig {
        JumpLadderConfig {
            lifetime_e1_s: 100.0,
            lifetime_e2_s: 0.01,
            probe_interval_s: 2.0,
            probe_perturbation: 1e-4,
            detection: LadderDetection::hg199_defaults(),
            aging_beta_per_s: 0.0,
            probe_sigma_fractional: 1e-7,
            horizon_s: 400.0,
            hazard_factor: 1.0,
        }
    }

    #[test]
    fn zeno_budget_enforced() {
        let mut c = base_config();
        // eps * lifetime / 0.01 = 1 s minimum for these numbers.
        c.probe_interval_s = 1.01;
        assert!(make_schedule(&c).is_ok());
        c.probe_interval_s = 0.5;
        match make_schedule(&c) {
            Err(LadderError::ZenoBudget {
                interval_s,
                minimum_s,
            }) => {
                assert_eq!(interval_s, 0.5);
                assert!((minimum_s - 1.0).abs() < 1e-12);
            }
            other => panic!("expected Zeno error, got {other:?}"),
        }
        // No perturbation, no budget.
        c.probe_perturbation = 0.0;
        c.probe_interval_s = 1e-4;
        assert!(make_schedule(&c).is_ok());
    }

    #[test]
    fn schedule_is_uniform_and_truncated() {
        let mut c = base_config();
        c.probe_interval_s = 2.0;
        c.horizon_s = 11.0;
        let times = make_schedule(&c).unwrap();
        assert_eq!(times, vec![2.0, 4.0, 6.0, 8.0, 10.0]);
    }

    #[test]
    fn runs_are_deterministic_and_probe_before_decay() {
        let c = base_config();
        let a = simulate_run(&c, 42, 7).unwrap();
        let b = simulate_run(&c, 42, 7).unwrap();
        assert_eq!(a, b);
        for run in simulate_runs(&c, 42, 2000).unwrap() {
            let mut last = 0.0;
            for p in &run.probes {
                assert!(p.t_s < run.decay_time_s);
                assert!(p.t_s > last);
                last = p.t_s;
            }
        }
    }

    #[test]
    fn decay_times_match_effective_lifetime() {
        let c = base_config();
        let runs = simulate_runs(&c, 9, 10_000).unwrap();
        let times: Vec<f64> = runs.iter().map(|r| r.decay_time_s).collect();
        let expected = 1.0 / c.effective_hazard_per_s();
        // Effective lifetime sits below the natural one.
        assert!((expected - 99.0).abs() < 1.0);
        let m = mean(&times);
        let se = sample_std(&times) / (times.len() as f64).sqrt();
        assert!((m - expected).abs() < 3.0 * se, "{m} vs {expected}");
    }

    #[test]
    fn readout_bright_fraction_tracks_miss_probability() {
        let mut c = base_config();
        c.probe_interval_s = 1.01;
        c.horizon_s = 2000.0;
        let runs = simulate_runs(&c, 21, 600).unwrap();
        let (mut bright, mut total) = (0u64, 0u64);
        for run in &runs {
            for p in &run.probes {
                total += 1;
                bright += u64::from(p.read_bright);
            }
        }
        assert!(total > 20_000, "{total}");
        let frac_dark = 1.0 - bright as f64 / total as f64;
        let miss = c.detection.thresholded().bright_miss();
        let band = 4.0 * (miss / total as f64).sqrt();
        assert!((frac_dark - miss).abs() < band, "{frac_dark} vs {miss}");
    }

    #[test]
    fn aging_two_point_slope_is_exact() {
        let run = JumpRun {
            run: 0,
            seed: 0,
            probes: vec![
                ProbeRecord {
                    t_s: 1.0,
                    freq_fractional: 1e-6,
                    sigma_fractional: 1e-9,
                    counts: 6,
                    read_bright: true,
                },
                ProbeRecord {
                    t_s: 3.0,
                    freq_fractional: 5e-6,
                    sigma_fractional: 1e-9,
                    counts: 7,
                    read_bright: true,
                },
            ],
            decay_time_s: 10.0,
        };
        let report = detect_aging(&[run]).unwrap();
        assert!((report.beta_per_s - 2e-6).abs() < 1e-18);
        assert_eq!(report.probes, 2);
    }

    #[test]
    fn aging_detection_power_and_null() {
        let mut c = base_config();
        c.probe_interval_s = 0.1;
        c.probe_perturbation = 1e-5;
        c.horizon_s = 10.0;
        c.aging_beta_per_s = 1e-6;
        for trial in 0..10 {
            let runs = simulate_runs(&c, 1000 + trial, 1).unwrap();
            let report = detect_aging(&runs).unwrap();
            assert!(report.z > 5.0, "trial {trial}: z {}", report.z);
            assert!(report.lo <= 1e-6 && 1e-6 <= report.hi * 1.5);
        }
        c.aging_beta_per_s = 0.0;
        let mut covered = 0;
        for trial in 0..200 {
            let runs = simulate_runs(&c, 5000 + trial, 1).unwrap();
            if let Ok(report) = detect_aging(&runs) {
                if report.lo <= 0.0 && 0.0 <= report.hi {
                    covered += 1;
                }
            }
        }
        assert!(covered >= 180, "covered {covered}");
    }

    #[test]
    fn memoryless_accepts_exponential_rejects_weibull_and_constants() {
        let c = base_config();
        let runs = simulate_runs(&c, 33, 1000).unwrap();
        let times: Vec<f64> = runs.iter().map(|r| r.decay_time_s).collect();
        let report = test_memoryless(&times, 1000, 77).unwrap();
        assert!(report.p_value > 0.01, "p = {}", report.p_value);
        assert!(
            (report.lambda_per_s - c.effective_hazard_per_s()).abs()
                < 0.1 * c.effective_hazard_per_s()
        );

        let constants = vec![3.0; 50];
        let degenerate = test_memoryless(&constants, 1000, 78).unwrap();
        assert!(degenerate.p_value < 1e-3);

        let mut rng = stream(55, Domain::Trial, 0);
        let weibull = Weibull::new(10.0, 2.0).unwrap();
        let shaped: Vec<f64> = (0..1000).map(|_| weibull.sample(&mut rng)).collect();
        let rejected = test_memoryless(&shaped, 1000, 79).unwrap();
        assert!(rejected.p_value < 0.01, "p = {}", rejected.p_value);
    }

    #[test]
    fn memoryless_input_validation() {
        assert_eq!(
            test_memoryless(&[1.0; 5], 100, 1),
            Err(LadderError::TooFewSamples { need: 10, got: 5 })
        );
        let mut times = vec![1.0; 12];
        times[3] = -2.0;
        assert_eq!(
            test_memoryless(&times, 100, 1),
            Err(LadderError::NonPositiveDecayTime {
                index: 3,
                value: -2.0
            })
        );
    }

    #[test]
    fn empirical_cdf_converges_to_exponential() {
        let c = base_config();
        let runs = simulate_runs(&c, 3, 10_000).unwrap();
        let times: Vec<f64> = runs.iter().map(|r| r.decay_time_s).collect();
        let d = ks_against_exponential(&times, c.effective_hazard_per_s());
        assert!(d < 0.02, "KS distance {d}");
    }

    #[test]
    fn config_validation() {
        let mut c = base_config();
        c.lifetime_e2_s = 200.0;
        assert!(matches!(
            c.validate(),
            Err(LadderError::LifetimeOrder { .. })
        ));
        c = base_config();
        c.probe_perturbation = 1.0;
        assert_eq!(c.validate(), Err(LadderError::BadPerturbation(1.0)));
        c = base_config();
        c.horizon_s = 0.0;
        assert!(matches!(c.validate(), Err(LadderError::BadParameter { .. })));
    }
}
