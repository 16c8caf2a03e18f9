//! Invert the two drift hypotheses: how old is this ion, and when will
//! that one decay?
//!
//! Relaxation drift A e^(-t/tau) makes age readable from a single shift
//! measurement; pre-decay drift kappa/(t_d - t) makes the decay time
//! predictable from a short series. Both inversions carry honest 95%
//! intervals, exercised here against known truths.
//!
//!     cargo run --example age_and_decay_prediction

use isochron::hfclock::{drift_fraction, estimate_age, predict_decay_time, DriftModel};
use isochron::nuclide::SECONDS_PER_YEAR;
use isochron::rng::{stream, Domain};
use rand_distr::{Distribution, Normal};

fn main() {
    // --- age from a relaxation shift ---
    let tau = 1e9 * SECONDS_PER_YEAR;
    let amplitude = 2e-12;
    let model = DriftModel::Relaxation { amplitude, tau_s: tau };
    let sigma = 2e-14;
    let noise = Normal::new(0.0, sigma).unwrap();
    let mut rng = stream(11, Domain::Trial, 0);

    println!("age from shift (A = {amplitude:.0e}, tau = 1e9 y, sigma = {sigma:.0e}):");
    for age_gyr in [0.5, 1.0, 2.0, 4.6] {
        let truth = age_gyr * 1e9 * SECONDS_PER_YEAR;
        let measured = drift_fraction(&model, truth).unwrap() + noise.sample(&mut rng);
        match estimate_age(amplitude, tau, measured, sigma) {
            Ok(est) => {
                let gyr = |s: f64| s / SECONDS_PER_YEAR / 1e9;
                println!(
                    "  true {age_gyr:.1} Gyr -> {:.2} Gyr, 95% [{:.2}, {}]",
                    gyr(est.age_s),
                    gyr(est.lo_s),
                    if est.hi_s.is_finite() {
                        format!("{:.2}", gyr(est.hi_s))
                    } else {
                        "inf".into() // shift within noise of zero: age unbounded above
                    }
                );
            }
            Err(e) => println!("  true {age_gyr:.1} Gyr -> {e}"),
        }
    }

    // --- decay time from a drifting series ---
    let kappa = 1e-5;
    let decay_time = 1e7;
    let model = DriftModel::Predecay { kappa_s: kappa, decay_time_s: decay_time };
    let noise = Normal::new(0.0, 5e-14).unwrap();
    println!();
    println!("decay time from 25 points over {:.1} d (truth {:.2} d):",
        25.0 * 3.2e5 / 86_400.0, decay_time / 86_400.0);
    for trial in 0..3u32 {
        let mut rng = stream(12, Domain::Trial, trial);
        let points: Vec<(f64, f64)> = (1..=25)
            .map(|k| {
                let t = k as f64 * 3.2e5;
                let clean = drift_fraction(&model, t).unwrap();
                (t, (clean + noise.sample(&mut rng)).max(1e-16))
            })
            .collect();
        let fit = predict_decay_time(kappa, &points).expect("fit");
        println!(
            "  trial {trial}: t_d = {:.3} d, 95% [{:.3}, {:.3}], {} iterations",
            fit.decay_time_s / 86_400.0,
            fit.lo_s / 86_400.0,
            fit.hi_s / 86_400.0,
            fit.iterations
        );
    }
}
