//! Tm-170: a clock isotope that is itself radioactive (128.6 d beta).
//!
//! Production is a single capture on mononuclidic Tm-169; afterwards the
//! sample decays on the shelf, which is simulated here as a zero-flux
//! segment seeded with the end-of-irradiation inventory. The decay clock
//! then motivates the pre-decay drift model: if the nuclear moment drifted
//! as kappa / (t_d - t), a series of frequency measurements would predict
//! the decay time t_d in advance.
//!
//!     cargo run --example tm170_decay_clock

use std::fs;
use std::path::Path;

use isochron::burnup::{solve_inventory, IrradiationScenario, Segment};
use isochron::hfclock::{drift_fraction, predict_decay_time, DriftModel};
use isochron::nuclide::{NuclideId, NuclideRegistry};
use isochron::rng::{stream, Domain};
use isochron::scenario::parse_scenario;
use rand_distr::{Distribution, Normal};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/tm170.scn");
    let doc = parse_scenario(&fs::read_to_string(path).expect("scenario")).expect("parse");
    let registry = NuclideRegistry::builtin();
    let (chain, irradiation) = doc.chain_inputs(registry).expect("chain");
    let trajectory = solve_inventory(&chain, &irradiation).expect("solve");

    let last = trajectory.atoms.len() - 1;
    let tm170 = chain.position(NuclideId::parse("Tm-170").unwrap()).unwrap();
    let produced = trajectory.atoms[last][tm170];
    println!("Tm-170 after 30 d irradiation: {produced:.4e} atoms");

    // Shelf decay: same chain, zero flux, one half-life.
    let half_life_s = 128.6 * 86_400.0;
    let shelf = IrradiationScenario {
        segments: vec![Segment {
            duration_s: half_life_s,
            flux: 0.0,
        }],
        initial_atoms: chain
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, node)| (node.id, trajectory.atoms[last][i]))
            .collect(),
        grid_points: 11,
    };
    let decayed = solve_inventory(&chain, &shelf).expect("shelf solve");
    let remaining = decayed.atoms.last().unwrap()[tm170];
    println!(
        "after one 128.6 d half-life on the shelf: {remaining:.4e} atoms (ratio {:.6})",
        remaining / produced
    );

    // Hypothetical pre-decay drift: synthesize a measurement series and
    // recover the decay time. kappa = 1e-5 s puts the fractional shift at
    // 1e-12 with 1e7 s remaining.
    let kappa = 1e-5;
    let decay_time = 0.6 * half_life_s;
    let model = DriftModel::Predecay {
        kappa_s: kappa,
        decay_time_s: decay_time,
    };
    let noise = Normal::new(0.0, 5e-14).unwrap();
    let mut rng = stream(7, Domain::Trial, 0);
    let points: Vec<(f64, f64)> = (1..=25)
        .map(|k| {
            let t = k as f64 * 2e5;
            let clean = drift_fraction(&model, t).expect("inside model range");
            (t, clean + noise.sample(&mut rng))
        })
        .collect();
    let fit = predict_decay_time(kappa, &points).expect("fit");
    println!();
    println!(
        "pre-decay fit: t_d = {:.4e} s (truth {decay_time:.4e}), 95% interval [{:.4e}, {:.4e}]",
        fit.decay_time_s, fit.lo_s, fit.hi_s
    );
    println!(
        "  = {:.1} d against the true {:.1} d, from {} frequency points",
        fit.decay_time_s / 86_400.0,
        decay_time / 86_400.0,
        points.len()
    );
}
