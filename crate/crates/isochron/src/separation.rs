//! Enrichment-cascade arithmetic: stage suppression, stage counts, purity
//! and recovered yield. Stages are scalar attenuators; no per-isotope
//! optics is modeled.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::nuclide::NuclideId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage {
    /// Attenuation applied to every non-product species (>= 1).
    pub suppression: f64,
    /// Fraction of the product carried through the stage, in (0, 1].
    pub recovery: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationPlan {
    pub stages: Vec<Stage>,
    /// Feed composition as mass fractions, summing to 1.
    pub composition: BTreeMap<NuclideId, f64>,
    pub product: NuclideId,
    /// Descriptive metadata only (resonant excite / ionize wavelengths).
    pub excite_nm: Option<f64>,
    pub ionize_nm: Option<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum SeparationError {
    #[error("stage {index}: {message}")]
    BadStage { index: usize, message: String },
    #[error("composition fractions sum to {sum}, expected 1 within 1e-9")]
    UnnormalizedComposition { sum: f64 },
    #[error("composition fraction for {nuclide} is {value}, outside [0, 1]")]
    BadFraction { nuclide: NuclideId, value: f64 },
    #[error("product {0} is not in the composition")]
    ProductMissing(NuclideId),
    #[error("per-stage factor {per_stage} cannot reach target {target}")]
    UnreachableTarget { per_stage: f64, target: f64 },
    #[error("target factor {0} must be >= 1")]
    BadTarget(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PurityReport {
    /// Post-cascade composition, renormalized to sum to 1.
    pub composition: BTreeMap<NuclideId, f64>,
    /// Product mass out divided by product mass in.
    pub product_recovery: f64,
    /// Product mass out divided by total feed mass.
    pub product_yield_fraction: f64,
    pub total_suppression: f64,
}

impl SeparationPlan {
    pub fn validate(&self) -> Result<(), SeparationError> {
        for (index, stage) in self.stages.iter().enumerate() {
            if !(stage.suppression >= 1.0) || !stage.suppression.is_finite() {
                return Err(SeparationError::BadStage {
                    index,
                    message: format!("suppression {} must be >= 1", stage.suppression),
                });
            }
            if !(stage.recovery > 0.0 && stage.recovery <= 1.0) {
                return Err(SeparationError::BadStage {
                    index,
                    message: format!("recovery {} must be in (0, 1]", stage.recovery),
                });
            }
        }
        let mut sum = 0.0;
        for (nuclide, &value) in &self.composition {
            if !(0.0..=1.0).contains(&value) {
                return Err(SeparationError::BadFraction {
                    nuclide: nuclide.clone(),
                    value,
                });
            }
            sum += value;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(SeparationError::UnnormalizedComposition { sum });
        }
        if !self.composition.contains_key(&self.product) {
            return Err(SeparationError::ProductMissing(self.product.clone()));
        }
        Ok(())
    }
}

/// Product of per-stage suppressions (log-additive, order-independent).
pub fn cascade_suppression(plan: &SeparationPlan) -> f64 {
    plan.stages.iter().map(|s| s.suppression).product()
}

/// Smallest k with per_stage^k >= target.
pub fn stages_required(per_stage: f64, target: f64) -> Result<u32, SeparationError> {
    if !(target >= 1.0) || !target.is_finite() {
        return Err(SeparationError::BadTarget(target));
    }
    if target == 1.0 {
        return Ok(0);
    }
    if per_stage <= 1.0 || !per_stage.is_finite() {
        return Err(SeparationError::UnreachableTarget { per_stage, target });
    }
    let mut reached = 1.0;
    let mut k = 0u32;
    while reached < target {
        reached *= per_stage;
        k += 1;
        if k > 4096 {
            // 1.01^4096 > 1e17; anything needing more stages is a typo.
            return Err(SeparationError::UnreachableTarget { per_stage, target });
        }
    }
    Ok(k)
}

/// Attenuate every non-product species by the cumulative suppression,
/// renormalize, and report the recovered product mass.
pub fn purity_after(plan: &SeparationPlan) -> Result<PurityReport, SeparationError> {
    plan.validate()?;
    let suppression = cascade_suppression(plan);
    let recovery: f64 = plan.stages.iter().map(|s| s.recovery).product();

    let mut surviving = BTreeMap::new();
    let mut total = 0.0;
    for (nuclide, &fraction) in &plan.composition {
        let kept = if *nuclide == plan.product {
            fraction
        } else {
            fraction / suppression
        };
        total += kept;
        surviving.insert(nuclide.clone(), kept);
    }
    let product_in = plan.composition[&plan.product];
    let composition = surviving
        .into_iter()
        .map(|(nuclide, kept)| (nuclide, kept / total))
        .collect();
    Ok(PurityReport {
        composition,
        product_recovery: recovery,
        product_yield_fraction: product_in * recovery,
        total_suppression: suppression,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(name: &str) -> NuclideId {
        NuclideId::parse(name).unwrap()
    }

    fn plan(stages: Vec<Stage>, composition: &[(&str, f64)], product: &str) -> SeparationPlan {
        SeparationPlan {
            stages,
            composition: composition
                .iter()
                .map(|(name, f)| (id(name), *f))
                .collect(),
            product: id(product),
            excite_nm: Some(461.0),
            ionize_nm: Some(405.0),
        }
    }

    fn stage(suppression: f64, recovery: f64) -> Stage {
        Stage {
            suppression,
            recovery,
        }
    }

    #[test]
    fn suppression_is_stage_product() {
        let p = plan(
            vec![stage(1e4, 1.0), stage(1e4, 1.0)],
            &[("Sr-87", 1.0)],
            "Sr-87",
        );
        assert_eq!(cascade_suppression(&p), 1e8);
        let none = plan(vec![], &[("Sr-87", 1.0)], "Sr-87");
        assert_eq!(cascade_suppression(&none), 1.0);
        let three = plan(
            vec![stage(1e3, 1.0), stage(1e3, 1.0), stage(1e3, 1.0)],
            &[("Sr-87", 1.0)],
            "Sr-87",
        );
        assert_eq!(cascade_suppression(&three), 1e9);
    }

    #[test]
    fn stage_counts() {
        assert_eq!(stages_required(1e4, 1e8).unwrap(), 2);
        assert_eq!(stages_required(1e4, 1.0).unwrap(), 0);
        assert_eq!(stages_required(1e3, 1e8).unwrap(), 3);
        // k is pinned by p^(k-1) < t <= p^k.
        for (p, t) in [(10.0, 1e6), (2.0, 33.0), (1e5, 1e8), (7.0, 7.0)] {
            let k = stages_required(p, t).unwrap();
            assert!(p.powi(k as i32) >= t, "p={p} t={t} k={k}");
            if k > 0 {
                assert!(p.powi(k as i32 - 1) < t, "p={p} t={t} k={k}");
            }
        }
        assert_eq!(
            stages_required(1.0, 10.0),
            Err(SeparationError::UnreachableTarget {
                per_stage: 1.0,
                target: 10.0
            })
        );
        assert_eq!(
            stages_required(10.0, 0.5),
            Err(SeparationError::BadTarget(0.5))
        );
    }

    #[test]
    fn purity_attenuates_and_renormalizes() {
        let p = plan(
            vec![stage(1e4, 0.98), stage(1e4, 0.98)],
            &[("Sr-87", 0.93), ("Sr-86", 0.07)],
            "Sr-87",
        );
        let report = purity_after(&p).unwrap();
        let contaminant = report.composition[&id("Sr-86")];
        // Exact arithmetic: (0.07/1e8) / (0.93 + 0.07/1e8), which rounds to
        // the 7e-10 scale (one significant figure).
        let exact = (0.07 / 1e8) / (0.93 + 0.07 / 1e8);
        assert!((contaminant - exact).abs() <= 1e-15 * exact);
        assert!((contaminant / 7e-10 - 1.0).abs() < 0.1);
        let total: f64 = report.composition.values().sum();
        assert!((total - 1.0).abs() <= 1e-9);
        assert!((report.product_recovery - 0.98 * 0.98).abs() < 1e-15);
        assert!((report.product_yield_fraction - 0.93 * 0.98 * 0.98).abs() < 1e-15);
        assert_eq!(report.total_suppression, 1e8);
    }

    #[test]
    fn unit_suppression_keeps_composition() {
        let p = plan(
            vec![stage(1.0, 1.0)],
            &[("Sr-87", 0.93), ("Sr-86", 0.07)],
            "Sr-87",
        );
        let report = purity_after(&p).unwrap();
        assert_eq!(report.composition[&id("Sr-87")], 0.93);
        assert_eq!(report.composition[&id("Sr-86")], 0.07);
        assert_eq!(report.product_recovery, 1.0);
    }

    #[test]
    fn full_recovery_conserves_product_mass() {
        let p = plan(
            vec![stage(1e5, 1.0), stage(1e3, 1.0)],
            &[("Lu-176", 0.4), ("Lu-175", 0.6)],
            "Lu-176",
        );
        let report = purity_after(&p).unwrap();
        assert_eq!(report.product_yield_fraction, 0.4);
    }

    #[test]
    fn stage_order_does_not_matter() {
        let forward = plan(
            vec![stage(1e3, 0.9), stage(1e5, 0.7)],
            &[("Sr-87", 0.5), ("Sr-86", 0.3), ("Sr-88", 0.2)],
            "Sr-87",
        );
        let mut reversed = forward.clone();
        reversed.stages.reverse();
        let a = purity_after(&forward).unwrap();
        let b = purity_after(&reversed).unwrap();
        assert_eq!(a.composition, b.composition);
        assert_eq!(a.product_recovery, b.product_recovery);
    }

    #[test]
    fn validation_errors() {
        let bad_stage = plan(vec![stage(0.5, 1.0)], &[("Sr-87", 1.0)], "Sr-87");
        assert!(matches!(
            purity_after(&bad_stage),
            Err(SeparationError::BadStage { index: 0, .. })
        ));
        let bad_recovery = plan(vec![stage(10.0, 0.0)], &[("Sr-87", 1.0)], "Sr-87");
        assert!(matches!(
            purity_after(&bad_recovery),
            Err(SeparationError::BadStage { index: 0, .. })
        ));
        let unnormalized = plan(vec![], &[("Sr-87", 0.5), ("Sr-86", 0.4)], "Sr-87");
        assert!(matches!(
            purity_after(&unnormalized),
            Err(SeparationError::UnnormalizedComposition { .. })
        ));
        let missing = plan(vec![], &[("Sr-86", 1.0)], "Sr-87");
        assert_eq!(
            purity_after(&missing),
            Err(SeparationError::ProductMissing(id("Sr-87")))
        );
    }
}
