//! The central experiment: do freshly produced ions tick like ancient ones?
//!
//! Two five-ion ensembles — one transmuted weeks ago, one from ore that is
//! billions of years old — are interrogated identically. Under the
//! scenario's relaxation drift model the new ensemble still carries nearly
//! the full 2e-12 moment shift while the natural one has relaxed away, so
//! the comparison lights up. With the drift turned off the same campaign
//! reports indistinguishable ensembles.
//!
//!     cargo run --example isotope_comparison

use std::fs;
use std::path::Path;

use isochron::hfclock::{run_campaign, DriftModel, Reading};
use isochron::scenario::parse_scenario;

fn print_readings(label: &str, readings: &[Reading]) {
    println!("  {label}:");
    for r in readings {
        println!(
            "    ion {}: {:+.4e} +/- {:.1e} fractional",
            r.ion, r.value_fractional, r.sigma_fractional
        );
    }
}

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/sr87.scn");
    let doc = parse_scenario(&fs::read_to_string(path).expect("scenario")).expect("parse");
    let config = doc.campaign().expect("campaign config");

    println!(
        "drift model: {:?}, ensembles aged {:.2e} s vs {:.2e} s",
        config.drift, config.new_age_s, config.natural_age_s
    );
    let outcome = run_campaign(&config, 42).expect("campaign");
    print_readings("new ensemble", &outcome.new_readings);
    print_readings("natural ensemble", &outcome.natural_readings);
    let c = &outcome.comparison;
    println!(
        "  delta = {:+.4e} +/- {:.1e}, z = {:.2} -> {}",
        c.delta_fractional,
        c.sigma_fractional,
        c.z_score,
        if c.distinguishable { "distinguishable" } else { "indistinguishable" }
    );

    // Null counterpart: identical physics, no moment drift.
    println!();
    let mut null_config = config;
    null_config.drift = DriftModel::None;
    let null = run_campaign(&null_config, 42).expect("null campaign");
    let c = &null.comparison;
    println!(
        "no-drift control: delta = {:+.4e} +/- {:.1e}, z = {:.2} -> {}",
        c.delta_fractional,
        c.sigma_fractional,
        c.z_score,
        if c.distinguishable { "distinguishable" } else { "indistinguishable" }
    );
}
