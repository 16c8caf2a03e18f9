//! Textbook Bateman closed forms for 2- and 3-species chains.
//!
//! These are written directly from the classical partial-fraction solution
//! — independently of the triangular eigen-solver — so tests can use them
//! as an oracle. `r` arguments are total removal rates (s⁻¹), `g` arguments
//! the transfer rate actually feeding the next species (g ≤ r).

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BatemanError {
    #[error("removal rates {0} and {1} coincide within 1e-12 relative; use the confluent form")]
    ConfluentRates(f64, f64),
    #[error("negative time {0}")]
    NegativeTime(f64),
}

fn distinct(a: f64, b: f64) -> bool {
    (a - b).abs() > 1e-12 * a.abs().max(b.abs())
}

/// Chain 1 → 2. Returns (N₁, N₂) at time `t` from N₁(0) = `n1_0`, N₂(0) = 0.
pub fn two_species(
    n1_0: f64,
    r1: f64,
    g1: f64,
    r2: f64,
    t: f64,
) -> Result<(f64, f64), BatemanError> {
    if t < 0.0 {
        return Err(BatemanError::NegativeTime(t));
    }
    if !distinct(r1, r2) {
        return Err(BatemanError::ConfluentRates(r1, r2));
    }
    let n1 = n1_0 * (-r1 * t).exp();
    // e^{−r1 t} − e^{−r2 t} = −e^{−r1 t}·expm1(−(r2−r1)·t), which stays
    // accurate when the two exponentials nearly coincide.
    let diff = -(-r1 * t).exp() * (-(r2 - r1) * t).exp_m1();
    let n2 = n1_0 * g1 * diff / (r2 - r1);
    Ok((n1, n2))
}

/// Confluent limit of [`two_species`] with r1 = r2 = `r`:
/// N₂(t) = N₁(0)·g·t·e^(−rt).
pub fn two_species_confluent(n1_0: f64, r: f64, g1: f64, t: f64) -> Result<(f64, f64), BatemanError> {
    if t < 0.0 {
        return Err(BatemanError::NegativeTime(t));
    }
    let e = (-r * t).exp();
    Ok((n1_0 * e, n1_0 * g1 * t * e))
}

/// Chain 1 → 2 → 3. Returns (N₁, N₂, N₃) at time `t` from N₁(0) = `n1_0`,
/// others starting at zero. All three removal rates must be distinct.
#[allow(clippy::too_many_arguments)]
pub fn three_species(
    n1_0: f64,
    r1: f64,
    g1: f64,
    r2: f64,
    g2: f64,
    r3: f64,
    t: f64,
) -> Result<(f64, f64, f64), BatemanError> {
    if t < 0.0 {
        return Err(BatemanError::NegativeTime(t));
    }
    for (a, b) in [(r1, r2), (r1, r3), (r2, r3)] {
        if !distinct(a, b) {
            return Err(BatemanError::ConfluentRates(a, b));
        }
    }
    let (e1, e2, e3) = ((-r1 * t).exp(), (-r2 * t).exp(), (-r3 * t).exp());
    let n1 = n1_0 * e1;
    let n2 = n1_0 * g1 * (e1 - e2) / (r2 - r1);
    let n3 = n1_0
        * g1
        * g2
        * (e1 / ((r2 - r1) * (r3 - r1)) + e2 / ((r1 - r2) * (r3 - r2))
            + e3 / ((r1 - r3) * (r2 - r3)));
    Ok((n1, n2, n3))
}
