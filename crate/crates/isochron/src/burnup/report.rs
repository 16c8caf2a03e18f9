//! End-of-run yield summary for one product nuclide.

use thiserror::Error;

use super::{mass_from_atoms, Chain, InventoryTrajectory};
use crate::nuclide::NuclideId;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{0} is not in the chain")]
    NotInChain(NuclideId),
    #[error("trajectory and chain disagree on column layout")]
    LayoutMismatch,
}

/// Double-capture contamination of the product: atoms of the product's own
/// capture product, relative to the product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleCapture {
    pub nuclide: NuclideId,
    /// contaminant atoms / product atoms at the end of the run (0 if the
    /// product count is zero).
    pub ratio: f64,
    /// ratio below the configured threshold?
    pub negligible: bool,
}

#[derive(Debug, Clone)]
pub struct YieldReport {
    pub nuclide: NuclideId,
    pub atoms_end: f64,
    pub mass_g_end: f64,
    /// Max deviation of the product series from its least-squares line,
    /// relative to the series maximum. Zero for an identically-zero series.
    pub linearity_dev: f64,
    /// Present when the chain retains a capture edge out of the product.
    pub double_capture: Option<DoubleCapture>,
}

/// Summarize `product` at the end of the trajectory. `negligible_threshold`
/// classifies the double-capture ratio (e.g. 0.05 for "anything under 5%
/// is negligible").
pub fn yield_report(
    chain: &Chain,
    traj: &InventoryTrajectory,
    product: NuclideId,
    negligible_threshold: f64,
) -> Result<YieldReport, ReportError> {
    let col = chain
        .position(product)
        .ok_or(ReportError::NotInChain(product))?;
    if traj.names.len() != chain.len() || traj.names[col] != product.to_string() {
        return Err(ReportError::LayoutMismatch);
    }
    let node = &chain.nodes()[col];
    let series: Vec<f64> = traj.atoms.iter().map(|row| row[col]).collect();
    let atoms_end = *series.last().unwrap_or(&0.0);

    let double_capture = node.capture_to.map(|contaminant_col| {
        let contaminant = chain.nodes()[contaminant_col].id;
        let contaminant_atoms = traj
            .atoms
            .last()
            .map(|row| row[contaminant_col])
            .unwrap_or(0.0);
        let ratio = if atoms_end > 0.0 {
            contaminant_atoms / atoms_end
        } else {
            0.0
        };
        DoubleCapture {
            nuclide: contaminant,
            ratio,
            negligible: ratio < negligible_threshold,
        }
    });

    Ok(YieldReport {
        nuclide: product,
        atoms_end,
        mass_g_end: mass_from_atoms(atoms_end, node.mass_u),
        linearity_dev: linearity_deviation(&traj.times_s, &series),
        double_capture,
    })
}

/// Max |residual| from the least-squares line, over the series maximum.
fn linearity_deviation(t: &[f64], y: &[f64]) -> f64 {
    let n = t.len() as f64;
    if t.len() < 2 {
        return 0.0;
    }
    let y_max = y.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    if y_max == 0.0 {
        return 0.0;
    }
    let t_mean = t.iter().sum::<f64>() / n;
    let y_mean = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&ti, &yi) in t.iter().zip(y) {
        sxx += (ti - t_mean) * (ti - t_mean);
        sxy += (ti - t_mean) * (yi - y_mean);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = y_mean - slope * t_mean;
    let max_resid = t
        .iter()
        .zip(y)
        .map(|(&ti, &yi)| (yi - (intercept + slope * ti)).abs())
        .fold(0.0_f64, f64::max);
    max_resid / y_max
}

#[cfg(test)]
mod tests {
    use super::super::{build_chain, solve_inventory, IrradiationScenario, Segment};
    use super::*;
    use crate::nuclide::{NuclideId, NuclideRegistry};
    use std::collections::BTreeMap;

    fn run_sr(duration_s: f64, points: usize) -> (super::super::Chain, InventoryTrajectory) {
        let reg = NuclideRegistry::builtin();
        let chain = build_chain(reg, NuclideId::parse("Sr-86").unwrap(), 2).unwrap();
        let mut initial_atoms = BTreeMap::new();
        initial_atoms.insert(NuclideId::parse("Sr-86").unwrap(), 1.4e23);
        let sc = IrradiationScenario {
            segments: vec![Segment {
                duration_s,
                flux: 1.0e13,
            }],
            initial_atoms,
            grid_points: points,
        };
        let traj = solve_inventory(&chain, &sc).unwrap();
        (chain, traj)
    }

    #[test]
    fn report_fields_are_consistent() {
        let (chain, traj) = run_sr(2_592_000.0, 301);
        let report = yield_report(
            &chain,
            &traj,
            NuclideId::parse("Sr-87").unwrap(),
            0.05,
        )
        .unwrap();
        assert!(report.atoms_end > 0.0);
        let expect_mass = report.atoms_end * 86.9088775 / super::super::AVOGADRO;
        assert!((report.mass_g_end - expect_mass).abs() < expect_mass * 1e-12);
        let dc = report.double_capture.unwrap();
        assert_eq!(dc.nuclide, NuclideId::parse("Sr-88").unwrap());
        assert!(dc.ratio > 0.0 && dc.ratio < 1e-3);
        assert!(dc.negligible);
    }

    #[test]
    fn linear_growth_has_small_deviation() {
        let (chain, traj) = run_sr(2_592_000.0, 301);
        let report = yield_report(
            &chain,
            &traj,
            NuclideId::parse("Sr-87").unwrap(),
            0.05,
        )
        .unwrap();
        assert!(
            report.linearity_dev < 0.01,
            "deviation {}",
            report.linearity_dev
        );
    }

    #[test]
    fn near_zero_duration_yields_nothing() {
        let (chain, traj) = run_sr(1e-6, 2);
        let report = yield_report(
            &chain,
            &traj,
            NuclideId::parse("Sr-87").unwrap(),
            0.05,
        )
        .unwrap();
        assert!(report.atoms_end < 1.0);
        assert!(report.mass_g_end < 1e-21);
    }

    #[test]
    fn product_without_capture_edge_has_no_double_capture() {
        let (chain, traj) = run_sr(2_592_000.0, 11);
        // Sr-88 is the chain's sink; it has no further capture edge.
        let report = yield_report(
            &chain,
            &traj,
            NuclideId::parse("Sr-88").unwrap(),
            0.05,
        )
        .unwrap();
        assert!(report.double_capture.is_none());
    }

    #[test]
    fn off_chain_product_is_an_error() {
        let (chain, traj) = run_sr(1000.0, 2);
        assert!(matches!(
            yield_report(&chain, &traj, NuclideId::parse("Hg-199").unwrap(), 0.05),
            Err(ReportError::NotInChain(_))
        ));
    }
}
