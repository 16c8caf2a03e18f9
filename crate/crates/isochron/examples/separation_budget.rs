//! Purity budget for resonance-ionization enrichment of the Sr-86 feed.
//!
//! Natural strontium carries 7% Sr-87 — exactly the isotope the clock
//! program later needs to be absent from the target. Each cascade stage
//! suppresses non-product species by 1e4 while keeping 98% of the product,
//! so two passes push the initial contamination down by eight orders of
//! magnitude.
//!
//!     cargo run --example separation_budget

use std::fs;
use std::path::Path;

use isochron::scenario::parse_scenario;
use isochron::separation::{cascade_suppression, purity_after, stages_required};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/sr87.scn");
    let doc = parse_scenario(&fs::read_to_string(path).expect("scenario")).expect("parse");
    let section = doc.separation_inputs().expect("separation section");
    let plan = &section.plan;

    println!(
        "feed ({} stages, product {}):",
        plan.stages.len(),
        plan.product
    );
    for (nuclide, fraction) in &plan.composition {
        println!("  {nuclide:<8} {fraction:.6}");
    }

    let report = purity_after(plan).expect("plan is valid");
    println!();
    println!("after cascade:");
    for (nuclide, fraction) in &report.composition {
        println!("  {nuclide:<8} {fraction:.3e}");
    }
    println!();
    println!("total suppression: {:.3e}", report.total_suppression);
    assert_eq!(report.total_suppression, cascade_suppression(plan));
    println!("product recovery:  {:.4}", report.product_recovery);
    println!("product yield:     {:.4} of feed mass", report.product_yield_fraction);

    // How many identical stages would a given purity goal take?
    if let (Some(per_stage), Some(target)) = (section.per_stage, section.target_suppression) {
        let stages = stages_required(per_stage, target).expect("reachable");
        println!();
        println!(
            "reaching {target:.1e} suppression at {per_stage:.1e}/stage takes {stages} stages"
        );
        for goal in [1e4, 1e6, 1e12] {
            let n = stages_required(per_stage, goal).expect("reachable");
            println!("  {goal:>8.1e} -> {n} stages");
        }
    }
}
