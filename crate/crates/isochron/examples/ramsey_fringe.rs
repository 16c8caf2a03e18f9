//! One Ramsey fringe scan on the 5 GHz Sr-87+ hyperfine line.
//!
//! Scans 11 detunings across the central fringe, draws binomial counts with
//! detection misclassification folded in, and fits the line center back
//! out. The printed table is the same data the `ramsey` subcommand writes
//! as CSV.
//!
//!     cargo run --example ramsey_fringe

use std::fs;
use std::path::Path;

use isochron::hfclock::{
    analytic_fringe, estimate_frequency, fringe_grid, half_max_detuning, required_shots,
    simulate_fringe,
};
use isochron::rng::{stream, Domain};
use isochron::scenario::parse_scenario;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/sr87.scn");
    let doc = parse_scenario(&fs::read_to_string(path).expect("scenario")).expect("parse");
    let (spec, section) = doc.fringe_inputs().expect("clock + ramsey sections");
    let config = section.config();

    // The scan resolution budget: projection noise over N total shots.
    let budget = required_shots(2e-14, spec.nu0_hz, config.free_s);
    println!(
        "clock {} at {:.3e} Hz, T = {} s, tau = {} s",
        spec.nuclide, spec.nu0_hz, config.free_s, config.pulse_s
    );
    println!(
        "shots for 2e-14 resolution: {budget} total, {} per point here",
        config.shots
    );
    let fwhm_hz = 2.0 * half_max_detuning(&config) / (2.0 * std::f64::consts::PI);
    println!(
        "fringe FWHM {fwhm_hz:.4} Hz vs ideal 1/(2T) = {:.4} Hz",
        1.0 / (2.0 * config.free_s)
    );

    let grid = fringe_grid(config.free_s, section.grid_points, section.grid_span);
    let truth = 1e-13; // injected fractional offset
    let mut rng = stream(42, Domain::Fringe, 0);
    let fringe = simulate_fringe(spec, &config, truth, &grid, &mut rng);
    let expected = analytic_fringe(spec, &config, truth, &grid);

    println!();
    println!("{:>12} {:>10} {:>10}", "detuning/Hz", "observed", "expected");
    for ((detuning, successes), p) in grid.iter().zip(&fringe.successes).zip(&expected) {
        println!(
            "{:>12.4} {:>10.5} {:>10.5}",
            detuning / (2.0 * std::f64::consts::PI),
            *successes as f64 / config.shots as f64,
            p
        );
    }

    let estimate = estimate_frequency(spec, &config, &fringe).expect("fit");
    println!();
    println!(
        "fit: offset {:.3e} +/- {:.3e} fractional (truth {truth:.1e}), {} iterations",
        estimate.offset_fractional, estimate.sigma_fractional, estimate.iterations
    );
    let pull = (estimate.offset_fractional - truth) / estimate.sigma_fractional;
    println!("pull: {pull:.2} sigma");
}
