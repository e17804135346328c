//! Electric-quadrupole shifts of `|F, m_F⟩` states in a trap whose potential,
//! in principal-axis coordinates, is `Φ = A [x² + y² - 2z² + ε (x² - y²)]`.
//!
//! Each shift factors into a unit-free angular coefficient of `(I, J, F, m_F)`
//! and a scalar `Θ(J) · A · g(α, β, ε)` converted to Hz. The sign of the
//! diagonal element follows
//!
//! `⟨F mF|H_Q|F mF⟩ = (-1)^(2F-mF+I+J) (2F+1) (F 2 F; -mF 0 mF) {F 2 F; J I J}
//!                    (J 2 J; -J 0 J)^(-1) Θ(J) A g(α, β, ε)`.

use crate::angular::{clebsch_gordan, wigner_3j, wigner_6j, AngularMomentum, Projection};
use crate::constants::CONSTANTS;
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::scalar::Real;
use crate::species::LevelSpec;
use crate::zeeman::BlockTemplate;

const RANK: AngularMomentum = AngularMomentum::integer(2);

/// Trap potential parameters relative to the quantization axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrapGeometry<T> {
    /// Potential curvature amplitude `A`, V/m².
    pub a_grad: T,
    /// Asymmetry `ε`, `|ε| ≤ 1`.
    pub epsilon: T,
    /// Euler angle `α`, rad.
    pub alpha: T,
    /// Euler angle `β`, rad.
    pub beta: T,
}

impl<T: Real> TrapGeometry<T> {
    pub fn new(a_grad: T, epsilon: T, alpha: T, beta: T) -> Result<Self> {
        for (name, v) in [("A", a_grad), ("epsilon", epsilon), ("alpha", alpha), ("beta", beta)] {
            if !v.is_finite() {
                return Err(Error::Validation {
                    field: format!("geometry.{name}"),
                    message: "must be finite".into(),
                });
            }
        }
        if epsilon.abs() > T::one() {
            return Err(Error::Validation {
                field: "geometry.epsilon".into(),
                message: format!("|ε| = {} exceeds 1", epsilon.abs()),
            });
        }
        Ok(Self {
            a_grad,
            epsilon,
            alpha,
            beta,
        })
    }
}

/// `3cos²β - 1 + ε sin²β (cos²α - sin²α)`.
pub fn geometry_factor<T: Real>(geom: &TrapGeometry<T>) -> T {
    let (sb, cb) = geom.beta.sin_cos();
    let (sa, ca) = geom.alpha.sin_cos();
    T::lit(3.0) * cb * cb - T::one() + geom.epsilon * sb * sb * (ca * ca - sa * sa)
}

fn sign(twice_exponent: i64) -> f64 {
    debug_assert!(twice_exponent % 2 == 0);
    if (twice_exponent / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn require_quadrupole(j: AngularMomentum) -> Result<()> {
    if j.twice() < 2 {
        return Err(Error::Precondition(format!(
            "a quadrupole moment needs J ≥ 1, got J = {j}"
        )));
    }
    Ok(())
}

/// `(J 2 J; -J 0 J)`, the normalization tying Θ(J) to the stretched state.
fn stretched_3j(j: AngularMomentum) -> Result<f64> {
    require_quadrupole(j)?;
    wigner_3j(j, RANK, j, -j.stretched(), Projection::ZERO, j.stretched())
}

/// `⟨J mJ|H_Q|J mJ⟩` in units of the scalar `Θ A g`:
/// `(-1)^(J-mJ) (J 2 J; -mJ 0 mJ) / (J 2 J; -J 0 J)`. Equals 1 at `mJ = J`.
pub fn j_basis_diagonal(j: AngularMomentum, mj: Projection) -> Result<f64> {
    let norm = stretched_3j(j)?;
    let tj = wigner_3j(j, RANK, j, -mj, Projection::ZERO, mj)?;
    Ok(sign(j.twice() as i64 - mj.twice() as i64) * tj / norm)
}

/// `⟨F' mF|H_Q|F mF⟩` in units of the scalar `Θ A g`, from 3j and 6j symbols.
pub fn relative_matrix_element(
    i: AngularMomentum,
    j: AngularMomentum,
    f_bra: AngularMomentum,
    f_ket: AngularMomentum,
    mf: Projection,
) -> Result<f64> {
    let norm = stretched_3j(j)?;
    let three_j = wigner_3j(f_bra, RANK, f_ket, -mf, Projection::ZERO, mf)?;
    if three_j == 0.0 {
        return Ok(0.0);
    }
    let six_j = wigner_6j(f_bra, RANK, f_ket, j, i, j);
    let phase = sign(
        2 * f_bra.twice() as i64 - mf.twice() as i64 + i.twice() as i64 + j.twice() as i64,
    );
    let mult = (f64::from(f_bra.multiplicity()) * f64::from(f_ket.multiplicity())).sqrt();
    Ok(phase * mult * three_j * six_j / norm)
}

/// Relative size of the shift of `|F, mF⟩` (the diagonal element above).
pub fn relative_coefficient(
    i: AngularMomentum,
    j: AngularMomentum,
    f: AngularMomentum,
    mf: Projection,
) -> Result<f64> {
    relative_matrix_element(i, j, f, f, mf)
}

/// The same matrix element by expanding both states over `|m_I, m_J⟩` and
/// using `⟨J mJ|H_Q|J mJ⟩`, since `H_Q` does not act on the nucleus.
pub fn relative_matrix_element_via_cg(
    i: AngularMomentum,
    j: AngularMomentum,
    f_bra: AngularMomentum,
    f_ket: AngularMomentum,
    mf: Projection,
) -> Result<f64> {
    let mut sum = 0.0;
    for mj in j.projections() {
        let mi = mf - mj;
        if !i.admits(mi) {
            continue;
        }
        let a = clebsch_gordan(i, j, f_bra, mi, mj, mf)?.value();
        let b = clebsch_gordan(i, j, f_ket, mi, mj, mf)?.value();
        sum += a * b * j_basis_diagonal(j, mj)?;
    }
    Ok(sum)
}

/// `Θ(J) · A · g(α, β, ε)` in Hz, using `e a₀² / h` for the units.
pub fn moment_scalar<T: Real>(level: &LevelSpec, geom: &TrapGeometry<T>) -> T {
    T::lit(level.theta_q * CONSTANTS.quadrupole_hz_per_v_m2()) * geom.a_grad * geometry_factor(geom)
}

/// Low-field quadrupole shift of one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadShift<T> {
    /// Hz.
    pub value: T,
    pub f: AngularMomentum,
    pub mf: Projection,
    /// Unit-free angular coefficient.
    pub relative: f64,
    /// `Θ A g`, Hz.
    pub scalar: T,
}

/// Quadrupole shift of `|F, mF⟩` in the low-field limit.
pub fn quad_shift<T: Real>(
    level: &LevelSpec,
    f: AngularMomentum,
    mf: Projection,
    geom: &TrapGeometry<T>,
) -> Result<QuadShift<T>> {
    if !level.admits_f(f) {
        return Err(Error::FOutOfRange {
            level: level.label.clone(),
            f: f.to_string(),
        });
    }
    if !f.admits(mf) {
        return Err(Error::InvalidQuantumNumber(format!(
            "mF = {mf} is not a projection of F = {f}"
        )));
    }
    if level.j.twice() < 2 {
        if level.theta_q != 0.0 {
            return Err(Error::Validation {
                field: format!("{}.theta_q_ea02", level.label),
                message: "must be 0 when J < 1".into(),
            });
        }
        return Ok(QuadShift {
            value: T::zero(),
            f,
            mf,
            relative: 0.0,
            scalar: T::zero(),
        });
    }
    let relative = relative_coefficient(level.i, level.j, f, mf)?;
    let scalar = moment_scalar(level, geom);
    Ok(QuadShift {
        value: T::lit(relative) * scalar,
        f,
        mf,
        relative,
        scalar,
    })
}

/// Full `H_Q` restricted to one `m_F` block, basis ordered like the Zeeman block, Hz.
pub fn quad_matrix<T: Real>(
    level: &LevelSpec,
    mf: Projection,
    geom: &TrapGeometry<T>,
) -> Result<SquareMatrix<T>> {
    let template = BlockTemplate::<T>::new(level, mf)?;
    let n = template.dim();
    if level.j.twice() < 2 {
        return Ok(SquareMatrix::zeros(n));
    }
    let scalar = moment_scalar(level, geom);
    let mut m = SquareMatrix::zeros(n);
    for r in 0..n {
        for c in 0..n {
            let rel = relative_matrix_element(level.i, level.j, template.basis[r], template.basis[c], mf)?;
            m[(r, c)] = T::lit(rel) * scalar;
        }
    }
    Ok(m)
}

fn require_full_block(level: &LevelSpec, mf: Projection) -> Result<()> {
    let (i, j) = (level.i.twice(), level.j.twice());
    if j < 2 {
        return Err(Error::Precondition(format!(
            "level {} has J = {}; averaging over F needs J ≥ 1",
            level.label, level.j
        )));
    }
    if i < j || mf.twice().unsigned_abs() > i - j {
        return Err(Error::Precondition(format!(
            "averaging over F needs I ≥ J and |mF| ≤ I - J so that all 2J+1 F states \
             exist for this mF (level {}: I = {}, J = {}, mF = {mf})",
            level.label, level.i, level.j
        )));
    }
    Ok(())
}

/// `(1/(2J+1)) Σ_F ⟨F mF|H_Q|F mF⟩`, Hz. Vanishes whenever it is defined.
pub fn quad_average_over_f<T: Real>(
    level: &LevelSpec,
    mf: Projection,
    geom: &TrapGeometry<T>,
) -> Result<T> {
    require_full_block(level, mf)?;
    let mut sum = T::zero();
    for f in level.f_values() {
        sum = sum + quad_shift(level, f, mf, geom)?.value;
    }
    Ok(sum / T::lit(f64::from(level.j.multiplicity())))
}

/// `Σ_n ⟨ψ_n|H_Q|ψ_n⟩` over the `2J+1` dressed states of the `mF` block at
/// field `B`, using the full `H_Q` matrix, Hz.
pub fn quad_trace_mixed<T: Real>(
    level: &LevelSpec,
    mf: Projection,
    field: T,
    geom: &TrapGeometry<T>,
) -> Result<T> {
    require_full_block(level, mf)?;
    let q = quad_matrix(level, mf, geom)?;
    let block = BlockTemplate::<T>::new(level, mf)?.at(field)?;
    Ok(block
        .eigenstates()
        .iter()
        .map(|s| q.bilinear(&s.amplitudes, &s.amplitudes))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::SpeciesDb;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn am(t: u32) -> AngularMomentum {
        AngularMomentum::from_twice(t)
    }
    fn pr(t: i32) -> Projection {
        Projection::from_twice(t)
    }
    fn geom(a: f64, eps: f64, alpha: f64, beta: f64) -> TrapGeometry<f64> {
        TrapGeometry::new(a, eps, alpha, beta).unwrap()
    }

    #[test]
    fn geometry_factor_examples() {
        assert!((geometry_factor(&geom(1.0, 0.3, 0.4, 0.0)) - 2.0).abs() < 1e-15);
        let magic = (1.0f64 / 3.0f64.sqrt()).acos();
        assert!(geometry_factor(&geom(1.0, 0.0, 0.0, magic)).abs() < 1e-15);
        assert!((geometry_factor(&geom(1.0, 0.5, 0.0, FRAC_PI_2)) + 0.5).abs() < 1e-15);
        let g32 = TrapGeometry::new(1.0f32, 0.5, 0.0, std::f32::consts::FRAC_PI_2).unwrap();
        assert!((geometry_factor(&g32) + 0.5).abs() < 1e-6);
    }

    #[test]
    fn epsilon_out_of_range_rejected() {
        assert!(TrapGeometry::new(1.0, 1.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn stretched_j_basis_element_is_one() {
        for tj in 2..10 {
            let j = am(tj);
            assert!((j_basis_diagonal(j, j.stretched()).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_for_small_j_or_zero_moment() {
        let db = SpeciesDb::builtin();
        let s = db.level("sr87", "2S1/2").unwrap();
        let q = quad_shift(s, am(8), pr(0), &geom(1e7, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(q.value, 0.0);
        let mut d = db.level("sr87", "2D5/2").unwrap().clone();
        d.theta_q = 0.0;
        let q = quad_shift(&d, am(4), pr(2), &geom(1e7, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(q.value, 0.0);
    }

    #[test]
    fn average_requires_full_block() {
        let db = SpeciesDb::builtin();
        let g = geom(1e6, 0.0, 0.0, 0.0);
        let lu175 = db.level("lu175", "3D1").unwrap();
        assert!(quad_average_over_f(lu175, pr(7), &g).is_err());
        let half = LevelSpec::bare("x", am(1), am(1), 2.0, 0.0);
        assert!(matches!(
            quad_average_over_f(&half, pr(0), &g),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn lu_f_averages_vanish() {
        let db = SpeciesDb::builtin();
        for (key, mf) in [("lu176", pr(0)), ("lu176", pr(-10)), ("lu175", pr(3))] {
            let l = db.level(key, "3D1").unwrap();
            for g in [geom(3e6, 0.2, 0.3, 0.4), geom(1e7, -0.9, 2.0, PI / 3.0)] {
                let avg = quad_average_over_f(l, mf, &g).unwrap();
                let biggest = l
                    .f_values()
                    .map(|f| quad_shift(l, f, mf, &g).unwrap().value.abs())
                    .fold(0.0, f64::max);
                assert!(biggest > 0.0);
                assert!(avg.abs() < 1e-10 * biggest, "{key} {avg}");
            }
        }
    }

    #[test]
    fn zero_field_trace_matches_f_average() {
        let db = SpeciesDb::builtin();
        let l = db.level("lu175", "3D1").unwrap();
        let g = geom(5e6, 0.1, 0.2, 0.3);
        let t = quad_trace_mixed(l, pr(3), 0.0, &g).unwrap();
        let a = quad_average_over_f(l, pr(3), &g).unwrap() * 3.0;
        assert!((t - a).abs() < 1e-12);
    }

    #[test]
    fn matrix_is_symmetric() {
        let db = SpeciesDb::builtin();
        let l = db.level("sr87", "2D5/2").unwrap();
        let q = quad_matrix(l, pr(2), &geom(1e6, 0.3, 0.1, 0.9)).unwrap();
        assert!(q.asymmetry() < 1e-12 * q.frobenius_norm());
    }
}
