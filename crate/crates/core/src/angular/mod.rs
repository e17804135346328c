//! Angular-momentum algebra: Wigner 3j and 6j symbols and Clebsch-Gordan
//! coefficients for integer and half-integer arguments.
//!
//! Quantum numbers are stored as twice-values ([`AngularMomentum`],
//! [`Projection`]) so parity and triangle checks are exact. Selection-rule
//! failures evaluate to `0.0`; malformed arguments (a projection outside its
//! multiplet, or of the wrong half-integer parity) are errors.
//!
//! Clebsch-Gordan coefficients follow the Condon-Shortley phase convention:
//! `⟨j1 m1 j2 m2 | J M⟩ = (-1)^(j1-j2+M) sqrt(2J+1) (j1 j2 J; m1 m2 -M)`.

mod qn;
mod racah;

pub use qn::{coupled_range, triangle, AngularMomentum, Projection};
pub use racah::SignedSqrt;

use crate::error::{Error, Result};

/// A dimensionless coupling coefficient (`|value| ≤ 1` for Clebsch-Gordan).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct CouplingCoefficient(pub f64);

impl CouplingCoefficient {
    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_projection(j: AngularMomentum, m: Projection) -> Result<()> {
    if (j.twice() as i32 - m.twice()) % 2 != 0 {
        return Err(Error::InvalidQuantumNumber(format!(
            "projection m = {m} has different half-integer parity from j = {j}"
        )));
    }
    if m.twice().unsigned_abs() > j.twice() {
        return Err(Error::InvalidQuantumNumber(format!(
            "projection m = {m} outside -{j}..{j}"
        )));
    }
    Ok(())
}

/// Exact 3j symbol `(j1 j2 j3; m1 m2 m3)` as `±sqrt(rational)`.
pub fn wigner_3j_exact(
    j1: AngularMomentum,
    j2: AngularMomentum,
    j3: AngularMomentum,
    m1: Projection,
    m2: Projection,
    m3: Projection,
) -> Result<SignedSqrt> {
    check_projection(j1, m1)?;
    check_projection(j2, m2)?;
    check_projection(j3, m3)?;
    if m1.twice() + m2.twice() + m3.twice() != 0 || !triangle(j1, j2, j3) {
        return Ok(SignedSqrt::zero());
    }
    Ok(racah::three_j(
        j1.twice().into(),
        j2.twice().into(),
        j3.twice().into(),
        m1.twice().into(),
        m2.twice().into(),
        m3.twice().into(),
    ))
}

/// Wigner 3j symbol `(j1 j2 j3; m1 m2 m3)`.
pub fn wigner_3j(
    j1: AngularMomentum,
    j2: AngularMomentum,
    j3: AngularMomentum,
    m1: Projection,
    m2: Projection,
    m3: Projection,
) -> Result<f64> {
    wigner_3j_exact(j1, j2, j3, m1, m2, m3).map(|v| v.to_f64())
}

/// Exact 6j symbol `{j1 j2 j3; j4 j5 j6}`.
pub fn wigner_6j_exact(
    j1: AngularMomentum,
    j2: AngularMomentum,
    j3: AngularMomentum,
    j4: AngularMomentum,
    j5: AngularMomentum,
    j6: AngularMomentum,
) -> SignedSqrt {
    if !(triangle(j1, j2, j3)
        && triangle(j1, j5, j6)
        && triangle(j4, j2, j6)
        && triangle(j4, j5, j3))
    {
        return SignedSqrt::zero();
    }
    racah::six_j(
        j1.twice().into(),
        j2.twice().into(),
        j3.twice().into(),
        j4.twice().into(),
        j5.twice().into(),
        j6.twice().into(),
    )
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}`.
///
/// Twice-value storage makes negative arguments unrepresentable, and a 6j
/// carries no projections, so every argument list is well formed.
pub fn wigner_6j(
    j1: AngularMomentum,
    j2: AngularMomentum,
    j3: AngularMomentum,
    j4: AngularMomentum,
    j5: AngularMomentum,
    j6: AngularMomentum,
) -> f64 {
    wigner_6j_exact(j1, j2, j3, j4, j5, j6).to_f64()
}

/// Clebsch-Gordan coefficient `⟨j1 m1 j2 m2 | j m⟩` (Condon-Shortley).
///
/// In the hyperfine setting `j1 = I`, `j2 = J`, `j = F`, so this is the
/// amplitude of `|I, J, m_I, m_J⟩` in `|F, m_F⟩`.
pub fn clebsch_gordan(
    j1: AngularMomentum,
    j2: AngularMomentum,
    j: AngularMomentum,
    m1: Projection,
    m2: Projection,
    m: Projection,
) -> Result<CouplingCoefficient> {
    let three_j = wigner_3j_exact(j1, j2, j, m1, m2, -m)?;
    if three_j.is_zero() {
        return Ok(CouplingCoefficient(0.0));
    }
    // (-1)^(j1 - j2 + m); the exponent is an integer whenever the 3j is nonzero.
    let exponent = (j1.twice() as i64 - j2.twice() as i64 + m.twice() as i64) / 2;
    let phase = if exponent.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let norm = f64::from(j.multiplicity()).sqrt();
    Ok(CouplingCoefficient(phase * norm * three_j.to_f64()))
}
