//! Irradiation/decay chain construction and exact inventory evolution.
//!
//! A [`Chain`] is a small DAG built from the registry by following capture
//! and decay edges out of a seed nuclide. The coupled rate equations
//! dN/dt = A·N are solved in closed form per constant-flux segment
//! (see [`solve_inventory`]); a fixed-step integrator in [`reference`]
//! provides an independent cross-check.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::nuclide::{LookupError, NuclideId, NuclideRegistry};

pub mod bateman;
pub mod reference;
mod report;
mod solve;

pub use report::{yield_report, DoubleCapture, ReportError, YieldReport};
pub use solve::{eigen_coefficients, solve_inventory, SolveError};

/// cm² per barn.
pub const BARN_CM2: f64 = 1e-24;
/// Atoms per mole (exact SI value).
pub const AVOGADRO: f64 = 6.022_140_76e23;

/// One nuclide in a chain, with the reaction edges that were retained.
///
/// Nuclides sitting at the chain's capture-depth limit keep no outgoing
/// edges at all: they act as accumulating sinks, so the chain stays closed
/// and "everything that ever arrived" is directly readable.
#[derive(Debug, Clone)]
pub struct ChainNode {
    pub id: NuclideId,
    /// Physical decay constant, s⁻¹ (0 for stable).
    pub lambda: f64,
    /// Retained capture cross section in barns (0 when `capture_to` is None).
    pub sigma_b: f64,
    /// Node index of the capture product, if the edge was retained.
    pub capture_to: Option<usize>,
    /// Retained decay edges as (node index, branching fraction).
    pub decay_to: Vec<(usize, f64)>,
    pub mass_u: f64,
    /// Number of captures on the shortest path from the seed.
    pub captures_from_seed: u32,
    /// True when outgoing reactions exist in the registry but were cut by
    /// the depth limit (the node is a truncation sink).
    pub truncated: bool,
}

/// Reaction/decay DAG in topological order (seed first).
#[derive(Debug, Clone)]
pub struct Chain {
    pub seed: NuclideId,
    nodes: Vec<ChainNode>,
    index: BTreeMap<NuclideId, usize>,
}

impl Chain {
    pub fn nodes(&self) -> &[ChainNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn position(&self, id: NuclideId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn names(&self) -> Vec<String> {
        self.nodes.iter().map(|n| n.id.to_string()).collect()
    }

    /// Replace the capture cross section on a node that kept its capture
    /// edge (scenario-level effective-sigma override).
    pub fn override_sigma(&mut self, id: NuclideId, sigma_b: f64) -> Result<(), ChainError> {
        let position = self.position(id).ok_or(ChainError::NoCapture(id))?;
        let node = &mut self.nodes[position];
        if node.capture_to.is_none() {
            return Err(ChainError::NoCapture(id));
        }
        node.sigma_b = sigma_b;
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("seed nuclide: {0}")]
    Seed(#[from] LookupError),
    #[error("{from} references {to}, which is not in the registry")]
    Unresolvable { from: NuclideId, to: NuclideId },
    #[error("decay cycle detected involving {0} (isomer mis-specification?)")]
    Cycle(NuclideId),
    #[error("{0} has no retained capture edge to override")]
    NoCapture(NuclideId),
}

/// Follow capture and decay edges out of `seed`, counting capture edges
/// toward `depth`. Decay edges are free; nuclides reached at the depth
/// limit are kept as edge-less sinks.
pub fn build_chain(
    registry: &NuclideRegistry,
    seed: NuclideId,
    depth: u32,
) -> Result<Chain, ChainError> {
    registry.get(seed)?;

    // Membership pass: capture-depth of every nuclide, level by level.
    // Within a level the decay closure runs to completion before captures
    // are followed, so a nuclide reachable both ways gets the smaller depth.
    let mut level_of: BTreeMap<NuclideId, u32> = BTreeMap::new();
    level_of.insert(seed, 0);
    let mut level_members = vec![seed];
    for level in 0..depth {
        // Decay closure at this level.
        let mut i = 0;
        while i < level_members.len() {
            let id = level_members[i];
            i += 1;
            let nuc = registry.get(id).expect("members are checked on insert");
            for branch in &nuc.decay {
                let daughter = branch.daughter;
                if registry.get(daughter).is_err() {
                    return Err(ChainError::Unresolvable {
                        from: id,
                        to: daughter,
                    });
                }
                if !level_of.contains_key(&daughter) {
                    level_of.insert(daughter, level);
                    level_members.push(daughter);
                }
            }
        }
        // Capture expansion into the next level.
        let mut next_level = Vec::new();
        for &id in &level_members {
            if let Some(cap) = registry.capture_on(id) {
                if registry.get(cap.product).is_err() {
                    return Err(ChainError::Unresolvable {
                        from: id,
                        to: cap.product,
                    });
                }
                if !level_of.contains_key(&cap.product) {
                    level_of.insert(cap.product, level + 1);
                    next_level.push(cap.product);
                }
            }
        }
        if next_level.is_empty() {
            break;
        }
        level_members = next_level;
    }

    // Kahn topological sort with a deterministic (level, id) tie-break, so
    // chain order — and hence CSV column order — is stable.
    let members: Vec<NuclideId> = level_of.keys().copied().collect();
    let pos: BTreeMap<NuclideId, usize> =
        members.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut indegree = vec![0usize; members.len()];
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); members.len()];
    for (i, id) in members.iter().enumerate() {
        if level_of[id] >= depth {
            continue; // sink: no outgoing edges
        }
        let nuc = registry.get(*id).expect("membership checked above");
        for branch in &nuc.decay {
            let j = pos[&branch.daughter];
            out_edges[i].push(j);
            indegree[j] += 1;
        }
        if let Some(cap) = registry.capture_on(*id) {
            let j = pos[&cap.product];
            out_edges[i].push(j);
            indegree[j] += 1;
        }
    }
    let mut ready: std::collections::BTreeSet<(u32, NuclideId)> = members
        .iter()
        .filter(|id| indegree[pos[id]] == 0)
        .map(|id| (level_of[id], *id))
        .collect();
    let mut order = Vec::with_capacity(members.len());
    while let Some(&(level, id)) = ready.iter().next() {
        ready.remove(&(level, id));
        order.push(id);
        for &j in &out_edges[pos[&id]] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.insert((level_of[&members[j]], members[j]));
            }
        }
    }
    if order.len() != members.len() {
        let stuck = members
            .iter()
            .find(|id| indegree[pos[id]] > 0)
            .copied()
            .unwrap_or(seed);
        return Err(ChainError::Cycle(stuck));
    }

    let node_index: BTreeMap<NuclideId, usize> =
        order.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut nodes = Vec::with_capacity(order.len());
    for id in &order {
        let nuc = registry.get(*id).expect("membership checked above");
        let at_limit = level_of[id] >= depth;
        let capture = registry.capture_on(*id);
        let has_outgoing = !nuc.decay.is_empty() || capture.is_some();
        let (sigma_b, capture_to) = match capture {
            Some(cap) if !at_limit => (cap.sigma_b, Some(node_index[&cap.product])),
            _ => (0.0, None),
        };
        let decay_to = if at_limit {
            Vec::new()
        } else {
            nuc.decay
                .iter()
                .map(|b| (node_index[&b.daughter], b.fraction))
                .collect()
        };
        nodes.push(ChainNode {
            id: *id,
            lambda: nuc.lambda(),
            sigma_b,
            capture_to,
            decay_to,
            mass_u: nuc.mass_u,
            captures_from_seed: level_of[id],
            truncated: at_limit && has_outgoing,
        });
    }
    Ok(Chain {
        seed,
        nodes,
        index: node_index,
    })
}

/// Rate matrix A (s⁻¹) for `chain` at neutron flux `flux` (cm⁻²·s⁻¹):
/// diagonal −(σφ + Σ λ·branching) per node, off-diagonal feeding terms.
/// Lower-triangular in chain order; columns sum to zero because every
/// retained edge lands inside the chain.
pub fn burnup_matrix(chain: &Chain, flux: f64) -> Vec<Vec<f64>> {
    let n = chain.len();
    let mut a = vec![vec![0.0; n]; n];
    for (i, node) in chain.nodes().iter().enumerate() {
        if let Some(j) = node.capture_to {
            let rate = node.sigma_b * BARN_CM2 * flux;
            a[i][i] -= rate;
            a[j][i] += rate;
            debug_assert!(j > i, "capture edge must point forward in topo order");
        }
        for &(j, fraction) in &node.decay_to {
            let rate = node.lambda * fraction;
            a[i][i] -= rate;
            a[j][i] += rate;
            debug_assert!(j > i, "decay edge must point forward in topo order");
        }
    }
    a
}

/// Constant-flux interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub duration_s: f64,
    pub flux: f64,
}

/// Inputs for one solve: flux history, starting atoms, output resolution.
#[derive(Debug, Clone)]
pub struct IrradiationScenario {
    pub segments: Vec<Segment>,
    pub initial_atoms: BTreeMap<NuclideId, f64>,
    pub grid_points: usize,
}

impl IrradiationScenario {
    pub fn total_duration_s(&self) -> f64 {
        self.segments.iter().map(|s| s.duration_s).sum()
    }
}

/// Atom counts on a time grid, one column per chain nuclide.
#[derive(Debug, Clone)]
pub struct InventoryTrajectory {
    pub names: Vec<String>,
    pub times_s: Vec<f64>,
    /// `atoms[row][col]` aligned with `times_s` and `names`.
    pub atoms: Vec<Vec<f64>>,
    pub segment_ends_s: Vec<f64>,
}

impl InventoryTrajectory {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let col = self.names.iter().position(|n| n == name)?;
        Some(self.atoms.iter().map(|row| row[col]).collect())
    }

    pub fn total_atoms(&self, row: usize) -> f64 {
        self.atoms[row].iter().sum()
    }

    /// Index of the grid row closest to time `t`.
    pub fn row_at(&self, t: f64) -> usize {
        self.times_s
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                (*a - t).abs().partial_cmp(&(*b - t).abs()).unwrap()
            })
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

/// Atoms in `mass_g` grams of a nuclide with atomic mass `mass_u`.
pub fn atoms_from_mass(mass_g: f64, mass_u: f64) -> f64 {
    mass_g * AVOGADRO / mass_u
}

/// Grams of `atoms` atoms with atomic mass `mass_u`.
pub fn mass_from_atoms(atoms: f64, mass_u: f64) -> f64 {
    atoms * mass_u / AVOGADRO
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> &'static NuclideRegistry {
        NuclideRegistry::builtin()
    }

    fn id(name: &str) -> NuclideId {
        NuclideId::parse(name).unwrap()
    }

    #[test]
    fn sr_chain_depth_two() {
        let chain = build_chain(reg(), id("Sr-86"), 2).unwrap();
        assert_eq!(
            chain.names(),
            vec!["Sr-86", "Sr-87m", "Sr-87", "Sr-88"],
        );
        let isomer = &chain.nodes()[1];
        assert_eq!(isomer.decay_to, vec![(2, 1.0)]);
        let sink = &chain.nodes()[3];
        assert!(sink.capture_to.is_none() && sink.decay_to.is_empty());
        assert!(!sink.truncated); // Sr-88 has no outgoing reactions anyway
    }

    #[test]
    fn tm_chain_depth_two_matches_expected_members() {
        let chain = build_chain(reg(), id("Tm-169"), 2).unwrap();
        assert_eq!(chain.names(), vec!["Tm-169", "Tm-170", "Yb-170", "Tm-171"]);
        // Tm-171 sits at the depth limit: its beta decay is cut and the
        // node accumulates everything double capture produced.
        let tm171 = &chain.nodes()[3];
        assert!(tm171.truncated);
        assert!(tm171.decay_to.is_empty());
        // Tm-170's beta edge to Yb-170 is retained.
        let tm170 = &chain.nodes()[1];
        assert_eq!(tm170.decay_to.len(), 1);
        assert_eq!(chain.nodes()[tm170.decay_to[0].0].id, id("Yb-170"));
    }

    #[test]
    fn depth_zero_is_seed_only() {
        let chain = build_chain(reg(), id("Sr-86"), 0).unwrap();
        assert_eq!(chain.names(), vec!["Sr-86"]);
        assert!(chain.nodes()[0].capture_to.is_none());
        assert!(chain.nodes()[0].truncated);
    }

    #[test]
    fn unknown_seed_is_a_lookup_error() {
        assert!(matches!(
            build_chain(reg(), id("Sr-90"), 2),
            Err(ChainError::Seed(LookupError::NotFound(_)))
        ));
    }

    #[test]
    fn matrix_is_lower_triangular_with_zero_column_sums() {
        let chain = build_chain(reg(), id("Yb-174"), 2).unwrap();
        let a = burnup_matrix(&chain, 1.0e13);
        let n = chain.len();
        for i in 0..n {
            for j in (i + 1)..n {
                assert_eq!(a[i][j], 0.0, "upper triangle must be empty");
            }
        }
        for j in 0..n {
            let col: f64 = (0..n).map(|i| a[i][j]).sum();
            assert!(col.abs() < 1e-25, "column {j} sums to {col}");
        }
    }

    #[test]
    fn matrix_diagonal_matches_rate_arithmetic() {
        let chain = build_chain(reg(), id("Lu-175"), 2).unwrap();
        let a = burnup_matrix(&chain, 1.0e13);
        let lu175 = chain.position(id("Lu-175")).unwrap();
        let lu176 = chain.position(id("Lu-176")).unwrap();
        // sigma*phi*1e-24: 23.4 b at 1e13 -> 2.34e-10 /s
        assert!((a[lu175][lu175] + 2.34e-10).abs() < 1e-16);
        // Lu-176: 2090 b capture dominates its tiny decay constant.
        let lambda176 = reg().by_name("Lu-176").unwrap().lambda();
        let expect = -(2090.0 * 1e-24 * 1e13 + lambda176);
        assert!((a[lu176][lu176] - expect).abs() < 1e-22);
        assert!((a[lu176][lu176] + 2.09e-8).abs() < 1e-11);
    }

    #[test]
    fn zero_flux_gives_pure_decay_matrix() {
        let chain = build_chain(reg(), id("Tm-169"), 2).unwrap();
        let a = burnup_matrix(&chain, 0.0);
        let tm169 = chain.position(id("Tm-169")).unwrap();
        let tm170 = chain.position(id("Tm-170")).unwrap();
        assert_eq!(a[tm169][tm169], 0.0); // stable, capture rate 0 at zero flux
        let lambda = reg().by_name("Tm-170").unwrap().lambda();
        assert_eq!(a[tm170][tm170], -lambda);
    }

    #[test]
    fn stable_only_chain_has_zero_matrix_at_zero_flux() {
        let chain = build_chain(reg(), id("Hg-199"), 2).unwrap();
        let a = burnup_matrix(&chain, 0.0);
        assert!(a.iter().flatten().all(|&x| x == 0.0));
    }
}
