//! The two lutetium production routes side by side.
//!
//! Lu-175 grows out of Yb-174 through a beta-decaying intermediate, so its
//! yield is gated by the 4.185 d Yb-175 half-life. Lu-176 grows directly on
//! a lutetium target, and its contamination of record is the second capture
//! into Lu-177 (2090 b!).
//!
//!     cargo run --example lutetium_chains

use std::fs;
use std::path::Path;

use isochron::burnup::{solve_inventory, yield_report, Chain, InventoryTrajectory};
use isochron::nuclide::NuclideRegistry;
use isochron::scenario::parse_scenario;

fn solve(name: &str) -> (Chain, InventoryTrajectory, f64) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../scenarios/{name}.scn"));
    let doc = parse_scenario(&fs::read_to_string(path).expect("scenario")).expect("parse");
    let (chain, irradiation) = doc
        .chain_inputs(NuclideRegistry::builtin())
        .expect("chain");
    let flux = irradiation.segments[0].flux;
    let trajectory = solve_inventory(&chain, &irradiation).expect("solve");
    (chain, trajectory, flux)
}

fn main() {
    let registry = NuclideRegistry::builtin();

    // Route 1: Yb-174(n,g) -> Yb-175m -> Yb-175 --beta--> Lu-175.
    let (chain, traj, flux) = solve("lu175");
    let last = traj.atoms.len() - 1;
    println!("lu175 chain: {}", traj.names.join(" -> "));
    let col = |names: &[String], want: &str| names.iter().position(|n| n == want).unwrap();
    let yb174 = traj.atoms[last][col(&traj.names, "Yb-174")];
    let yb175 = traj.atoms[last][col(&traj.names, "Yb-175")];
    let lu175 = traj.atoms[last][col(&traj.names, "Lu-175")];
    println!("  after 30 d: Yb-174 {yb174:.4e}, Yb-175 {yb175:.4e}, Lu-175 {lu175:.4e}");

    // The intermediate sits at quasi-static equilibrium: its decay rate
    // nearly equals the capture feed once several half-lives have passed.
    let lambda = registry.by_name("Yb-175").unwrap().lambda();
    let node = &chain.nodes()[chain.position(registry.by_name("Yb-174").unwrap().id).unwrap()];
    let feed = node.sigma_b * 1e-24 * flux * yb174;
    let saturation = lambda * yb175 / feed;
    let closed_form = 1.0 - (-lambda * 2_592_000.0).exp();
    println!("  saturation: {saturation:.5} (closed form {closed_form:.5})");

    // Route 2: Lu-175(n,g) -> Lu-176, with Lu-177 as double-capture tax.
    let (chain, traj, _) = solve("lu176");
    println!();
    println!("lu176 chain: {}", traj.names.join(" -> "));
    let product = registry.by_name("Lu-176").unwrap().id;
    let report = yield_report(&chain, &traj, product, 0.05).expect("report");
    println!(
        "  Lu-176 after 30 d: {:.4e} atoms = {:.4} mg",
        report.atoms_end,
        report.mass_g_end * 1e3
    );
    let dc = report.double_capture.expect("capture edge retained");
    println!(
        "  {} contamination: {:.3}% of product ({} at the 5% threshold)",
        dc.nuclide,
        dc.ratio * 1e2,
        if dc.negligible { "negligible" } else { "significant" }
    );
}
