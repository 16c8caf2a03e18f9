//! Telegraph record of a single shelved ion, probed until it jumps.
//!
//! While the ion sits in the long-lived e1 state, the e1 -> e2 clock
//! transition is probed every 0.1 s: bright means still shelved, dark means
//! it has decayed. Each probe nudges the ion with a 1e-5 induced-decay
//! probability, so the schedule builder enforces a Zeno budget — probe
//! hazard at most 1% of natural. The run batch then feeds two analyses:
//! a regression for frequency aging while shelved, and a bootstrap test
//! that the decay times are memoryless.
//!
//!     cargo run --example quantum_jump_telegraph

use std::fs;
use std::path::Path;

use isochron::ladder::{detect_aging, make_schedule, simulate_runs, test_memoryless};
use isochron::scenario::parse_scenario;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/hg199_ladder.scn");
    let doc = parse_scenario(&fs::read_to_string(path).expect("scenario")).expect("parse");
    let section = doc.ladder_inputs().expect("ladder section");
    let config = &section.config;

    println!(
        "e1 lifetime {} s, probe every {} s, perturbation {:.0e}",
        config.lifetime_e1_s, config.probe_interval_s, config.probe_perturbation
    );
    println!(
        "effective hazard {:.5e} /s vs natural {:.5e} /s",
        config.effective_hazard_per_s(),
        1.0 / config.lifetime_e1_s
    );

    // Probing any faster would violate the 1% Zeno budget.
    let mut too_fast = config.clone();
    too_fast.probe_interval_s = 0.05;
    match make_schedule(&too_fast) {
        Err(e) => println!("0.05 s schedule rejected: {e}"),
        Ok(_) => unreachable!("0.05 s is below the Zeno minimum"),
    }

    let runs = simulate_runs(config, 42, section.runs).expect("runs");
    println!();
    let first = &runs[0];
    println!(
        "run 0: decayed at {:.2} s after {} probes; first probes:",
        first.decay_time_s,
        first.probes.len()
    );
    for probe in first.probes.iter().take(5) {
        println!(
            "  t = {:.1} s  freq {:+.3e}  counts {:>2}  {}",
            probe.t_s,
            probe.freq_fractional,
            probe.counts,
            if probe.read_bright { "bright" } else { "dark" }
        );
    }

    let mean = runs.iter().map(|r| r.decay_time_s).sum::<f64>() / runs.len() as f64;
    let survived = runs
        .iter()
        .filter(|r| r.decay_time_s >= config.horizon_s)
        .count();
    println!();
    println!(
        "{} runs: mean decay draw {mean:.1} s, {survived} still shelved at the {} s horizon",
        runs.len(),
        config.horizon_s
    );

    let aging = detect_aging(&runs).expect("aging fit");
    println!(
        "aging: beta = {:.4e} +/- {:.1e} /s (z = {:.1}), truth {:.1e}",
        aging.beta_per_s, aging.sigma, aging.z, config.aging_beta_per_s
    );

    let decay_times: Vec<f64> = runs.iter().map(|r| r.decay_time_s).collect();
    let memoryless = test_memoryless(&decay_times, section.bootstrap, 42).expect("ks test");
    println!(
        "memoryless test: KS = {:.4}, p = {:.3} over {} resamples (lambda_hat = {:.4e} /s)",
        memoryless.ks_statistic, memoryless.p_value, memoryless.bootstrap, memoryless.lambda_per_s
    );
}
