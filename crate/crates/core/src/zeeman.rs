//! Hyperfine plus Zeeman Hamiltonian of one fine-structure level, one
//! `m_F` block at a time, in the coupled `|F, m_F⟩` basis.
//!
//! The block is `H = H0 + H1 + H2`: `H0` holds the zero-field energies `E_F`,
//! `H1` the first-order Zeeman terms `gF mF μB B` on the diagonal and `H2`
//! the `|ΔF| = 1` couplings `(gJ - gI) μB B ⟨F'|Jz|F⟩`, evaluated by expanding
//! both states in the `|m_I, m_J⟩` basis.

use crate::angular::{clebsch_gordan, AngularMomentum, Projection};
use crate::constants::CONSTANTS;
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, SquareMatrix};
use crate::numdiff::{derivative, Derivative};
use crate::scalar::Real;
use crate::species::LevelSpec;

/// Smallest frequency change treated as resolved, Hz.
pub const FREQUENCY_RESOLUTION_HZ: f64 = 1e-6;

/// `⟨F', mF| Jz |F, mF⟩` by Clebsch-Gordan expansion over `m_J`.
pub fn jz_element(
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
        sum += a * b * mj.value();
    }
    Ok(sum)
}

fn check_projection(level: &LevelSpec, mf: Projection) -> Result<()> {
    let top = level.i.twice() + level.j.twice();
    if mf.twice().unsigned_abs() > top || (top as i32 - mf.twice()) % 2 != 0 {
        return Err(Error::InvalidQuantumNumber(format!(
            "mF = {mf} is not a projection of level {} (I = {}, J = {})",
            level.label, level.i, level.j
        )));
    }
    Ok(())
}

/// The field-independent parts of one `m_F` block.
#[derive(Clone, Debug)]
pub struct BlockTemplate<'a, T> {
    pub level: &'a LevelSpec,
    pub mf: Projection,
    /// `F` labels of the basis, ascending.
    pub basis: Vec<AngularMomentum>,
    /// `E_F`, Hz.
    pub zero_field: Vec<T>,
    /// `∂H/∂B`, Hz/G.
    pub zeeman: SquareMatrix<T>,
}

impl<'a, T: Real> BlockTemplate<'a, T> {
    pub fn new(level: &'a LevelSpec, mf: Projection) -> Result<Self> {
        check_projection(level, mf)?;
        let basis: Vec<_> = level
            .f_values()
            .filter(|f| f.twice() >= mf.twice().unsigned_abs())
            .collect();
        let mu = CONSTANTS.mu_b_over_h;
        let mut zeeman = SquareMatrix::zeros(basis.len());
        for (a, &fa) in basis.iter().enumerate() {
            zeeman[(a, a)] = T::lit(level.g_f(fa) * mf.value() * mu);
            if let Some(&fb) = basis.get(a + 1) {
                let off = (level.g_j - level.g_i) * jz_element(level.i, level.j, fa, fb, mf)? * mu;
                zeeman[(a, a + 1)] = T::lit(off);
                zeeman[(a + 1, a)] = T::lit(off);
            }
        }
        let zero_field = basis
            .iter()
            .map(|&f| T::lit(level.hyperfine_energy_unchecked(f)))
            .collect();
        Ok(Self {
            level,
            mf,
            basis,
            zero_field,
            zeeman,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, f: AngularMomentum) -> Option<usize> {
        self.basis.iter().position(|&x| x == f)
    }

    pub fn at(&self, field: T) -> Result<ZeemanBlock<'a, T>> {
        if field.is_nan() || field < T::zero() || !field.is_finite() {
            return Err(Error::Precondition(format!(
                "magnetic field must be finite and non-negative, got {field} G"
            )));
        }
        let n = self.dim();
        let matrix = SquareMatrix::from_fn(n, |r, c| {
            let h0 = if r == c { self.zero_field[r] } else { T::zero() };
            h0 + self.zeeman[(r, c)] * field
        });
        Ok(ZeemanBlock {
            level: self.level,
            mf: self.mf,
            field,
            basis: self.basis.clone(),
            matrix,
            zero_field: self.zero_field.clone(),
            zeeman: self.zeeman.clone(),
        })
    }

    /// Energy of the dressed state adiabatically connected to `f`, Hz.
    pub fn energy(&self, f: AngularMomentum, field: T) -> Result<T> {
        self.at(field)?.state(f).map(|s| s.energy)
    }

    /// `E(B) - E_F` of the dressed state labelled `f`, Hz.
    pub fn shift(&self, f: AngularMomentum, field: T) -> Result<T> {
        self.at(field)?.state(f).map(|s| s.shift)
    }

    /// `dE/dB` of the dressed state labelled `f` from `⟨ψ|∂H/∂B|ψ⟩`, Hz/G.
    pub fn slope(&self, f: AngularMomentum, field: T) -> Result<T> {
        let block = self.at(field)?;
        let state = block.state(f)?;
        Ok(block.zeeman.bilinear(&state.amplitudes, &state.amplitudes))
    }
}

/// One `m_F` block at field `B`.
#[derive(Clone, Debug)]
pub struct ZeemanBlock<'a, T> {
    pub level: &'a LevelSpec,
    pub mf: Projection,
    /// Gauss.
    pub field: T,
    pub basis: Vec<AngularMomentum>,
    /// Symmetric, Hz.
    pub matrix: SquareMatrix<T>,
    /// `E_F` of the basis, Hz.
    pub zero_field: Vec<T>,
    /// `∂H/∂B`, Hz/G.
    pub zeeman: SquareMatrix<T>,
}

/// An eigenstate of a [`ZeemanBlock`].
#[derive(Clone, Debug, PartialEq)]
pub struct DressedState<T> {
    /// Hz.
    pub energy: T,
    /// `energy - E_F` of the label, accumulated without cancellation, Hz.
    pub shift: T,
    /// Zero-field `F` this state connects to.
    pub f_label: AngularMomentum,
    pub mf: Projection,
    /// Components over the block basis; the labelled component is positive.
    pub amplitudes: Vec<T>,
}

/// Builds the `m_F` block of `level` at `field` gauss.
pub fn build_block<T: Real>(
    level: &LevelSpec,
    mf: Projection,
    field: T,
) -> Result<ZeemanBlock<'_, T>> {
    BlockTemplate::new(level, mf)?.at(field)
}

impl<'a, T: Real> ZeemanBlock<'a, T> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Full eigendecomposition, one state per basis label, ordered like the basis.
    ///
    /// Labels come from the largest `|overlap|` with the zero-field basis
    /// vectors, assigned greedily over all (state, label) pairs so that every
    /// label is used once; equal overlaps go to the lower energy first.
    pub fn eigenstates(&self) -> Vec<DressedState<T>> {
        let n = self.dim();
        let eig = symmetric_eigen(&self.matrix);

        let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |k| (a, k))).collect();
        pairs.sort_by(|&(a1, k1), &(a2, k2)| {
            let o1 = eig.vectors[(a1, k1)].abs();
            let o2 = eig.vectors[(a2, k2)].abs();
            o2.partial_cmp(&o1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(
                    eig.values[k1]
                        .partial_cmp(&eig.values[k2])
                        .unwrap_or(std::cmp::Ordering::Equal),
                )
        });

        let mut label_of_state = vec![usize::MAX; n];
        let mut used = vec![false; n];
        for (a, k) in pairs {
            if label_of_state[k] == usize::MAX && !used[a] {
                label_of_state[k] = a;
                used[a] = true;
            }
        }

        let mut states: Vec<Option<DressedState<T>>> = vec![None; n];
        for (k, &a) in label_of_state.iter().enumerate() {
            let mut amplitudes = eig.vectors.column(k);
            if amplitudes[a] < T::zero() {
                amplitudes.iter_mut().for_each(|x| *x = -*x);
            }
            let shift = self.zeeman[(k, k)] * self.field
                + eig.shifts[k]
                + (self.zero_field[k] - self.zero_field[a]);
            states[a] = Some(DressedState {
                energy: eig.values[k],
                shift,
                f_label: self.basis[a],
                mf: self.mf,
                amplitudes,
            });
        }
        states.into_iter().map(|s| s.expect("every label assigned")).collect()
    }

    pub fn state(&self, f: AngularMomentum) -> Result<DressedState<T>> {
        self.eigenstates()
            .into_iter()
            .find(|s| s.f_label == f)
            .ok_or_else(|| Error::LabelNotFound {
                level: self.level.label.clone(),
                f: f.to_string(),
                mf: self.mf.to_string(),
            })
    }
}

/// One `|level, F, m_F⟩` state.
#[derive(Clone, Copy, Debug)]
pub struct StateSpec<'a> {
    pub level: &'a LevelSpec,
    pub f: AngularMomentum,
    pub mf: Projection,
}

impl<'a> StateSpec<'a> {
    pub fn new(level: &'a LevelSpec, f: AngularMomentum, mf: Projection) -> Result<Self> {
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
        Ok(Self { level, f, mf })
    }

    pub fn prepare<T: Real>(&self) -> Result<PreparedState<'a, T>> {
        Ok(PreparedState {
            template: BlockTemplate::new(self.level, self.mf)?,
            f: self.f,
        })
    }

    /// `<label>_F<2F>_mF<2mF>`.
    pub fn column_label(&self) -> String {
        format!("{}_F{}_mF{}", self.level.label, self.f.twice(), self.mf.twice())
    }
}

/// A state with its block template built once for repeated evaluation.
#[derive(Clone, Debug)]
pub struct PreparedState<'a, T> {
    pub template: BlockTemplate<'a, T>,
    pub f: AngularMomentum,
}

impl<T: Real> PreparedState<'_, T> {
    pub fn energy(&self, field: T) -> Result<T> {
        self.template.energy(self.f, field)
    }

    pub fn shift(&self, field: T) -> Result<T> {
        self.template.shift(self.f, field)
    }

    pub fn slope(&self, field: T) -> Result<T> {
        self.template.slope(self.f, field)
    }
}

/// An optical transition `ground → excited`. Frequencies exclude the optical
/// offset: each level's energies are measured from its hyperfine centroid.
#[derive(Clone, Copy, Debug)]
pub struct Transition<'a> {
    pub ground: StateSpec<'a>,
    pub excited: StateSpec<'a>,
}

impl<'a> Transition<'a> {
    pub fn new(ground: StateSpec<'a>, excited: StateSpec<'a>) -> Result<Self> {
        let (a, b) = (ground.level.g_i, excited.level.g_i);
        if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
            return Err(Error::Precondition(format!(
                "levels {} and {} have different nuclear g-factors ({a} vs {b})",
                ground.level.label, excited.level.label
            )));
        }
        Ok(Self { ground, excited })
    }

    pub fn prepare<T: Real>(&self) -> Result<PreparedTransition<'a, T>> {
        Ok(PreparedTransition {
            ground: self.ground.prepare()?,
            excited: self.excited.prepare()?,
        })
    }

    pub fn frequency<T: Real>(&self, field: T) -> Result<T> {
        self.prepare()?.frequency(field)
    }
}

#[derive(Clone, Debug)]
pub struct PreparedTransition<'a, T> {
    pub ground: PreparedState<'a, T>,
    pub excited: PreparedState<'a, T>,
}

impl<T: Real> PreparedTransition<'_, T> {
    pub fn frequency(&self, field: T) -> Result<T> {
        Ok(self.excited.energy(field)? - self.ground.energy(field)?)
    }

    /// `ν(B) - ν(0)`, Hz.
    pub fn shift(&self, field: T) -> Result<T> {
        Ok(self.excited.shift(field)? - self.ground.shift(field)?)
    }

    /// Exact `dν/dB` from the eigenvectors, Hz/G.
    pub fn slope(&self, field: T) -> Result<T> {
        Ok(self.excited.slope(field)? - self.ground.slope(field)?)
    }
}

/// `E_excited(B) - E_ground(B)`, Hz.
pub fn transition_frequency<T: Real>(
    ground: StateSpec<'_>,
    excited: StateSpec<'_>,
    field: T,
) -> Result<T> {
    Transition::new(ground, excited)?.frequency(field)
}

/// Default finite-difference step: `max(1e-3 B, 1e-3 G)`.
pub fn default_step(field: f64) -> f64 {
    (1e-3 * field).max(1e-3)
}

/// Central finite-difference derivative of any field-dependent frequency.
/// The stencil spans `B ± h_step`, so `B - h_step` must be non-negative.
pub fn field_derivative(
    f: impl FnMut(f64) -> Result<f64>,
    field: f64,
    h_step: Option<f64>,
) -> Result<Derivative<f64>> {
    let h = h_step.unwrap_or_else(|| default_step(field));
    if field - h < 0.0 || h <= 0.0 {
        return Err(Error::StepTooLarge { b: field, h });
    }
    derivative(f, field, h, FREQUENCY_RESOLUTION_HZ)
}

/// `dν/dB` of a transition by five-point differences with a Richardson
/// estimate and error bar.
pub fn dnu_db(transition: &Transition<'_>, field: f64, h_step: Option<f64>) -> Result<Derivative<f64>> {
    let prepared = transition.prepare::<f64>()?;
    field_derivative(|b| prepared.shift(b), field, h_step)
}

/// Second-order perturbative Zeeman coefficients `Σ_F' |Z_FF'|² / (E_F - E_F')`
/// for each basis `F` of the block, Hz/G².
pub fn perturbative_quadratic(level: &LevelSpec, mf: Projection) -> Result<Vec<(AngularMomentum, f64)>> {
    let t = BlockTemplate::<f64>::new(level, mf)?;
    Ok((0..t.dim())
        .map(|a| {
            let k = (0..t.dim())
                .filter(|&b| b != a)
                .map(|b| t.zeeman[(a, b)].powi(2) / (t.zero_field[a] - t.zero_field[b]))
                .sum();
            (t.basis[a], k)
        })
        .collect())
}

/// Quadratic Zeeman coefficient `k` in `E(B) = E(0) + s B + k B² + ...` of
/// the dressed state `f`, from the diagonalized block, Hz/G².
///
/// The linear term is removed exactly and the cubic term by a Richardson
/// combination of steps `h` and `2h`, with `h` well inside the perturbative
/// regime of the block.
pub fn quadratic_coefficient(level: &LevelSpec, f: AngularMomentum, mf: Projection) -> Result<f64> {
    let t = BlockTemplate::<f64>::new(level, mf)?;
    if t.dim() == 1 {
        return Ok(0.0);
    }
    let gap = t
        .zero_field
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(f64::INFINITY, f64::min);
    let coupling = (0..t.dim() - 1)
        .map(|a| t.zeeman[(a, a + 1)].abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    let h = (1e-4 * gap / coupling).min(1.0);
    let s0 = t.slope(f, 0.0)?;
    let d = |step: f64| -> Result<f64> { Ok((t.shift(f, step)? - s0 * step) / (step * step)) };
    Ok(2.0 * d(h)? - d(2.0 * h)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::SpeciesDb;

    fn am(t: u32) -> AngularMomentum {
        AngularMomentum::from_twice(t)
    }
    fn pr(t: i32) -> Projection {
        Projection::from_twice(t)
    }

    #[test]
    fn zero_field_block_is_diagonal() {
        let db = SpeciesDb::builtin();
        let l = db.level("lu176", "3D1").unwrap();
        let b = build_block(l, pr(0), 0.0).unwrap();
        assert_eq!(b.dim(), 3);
        for s in b.eigenstates() {
            assert_eq!(s.energy, l.hyperfine_energy(s.f_label).unwrap());
            let idx = b.basis.iter().position(|&f| f == s.f_label).unwrap();
            for (k, &a) in s.amplitudes.iter().enumerate() {
                assert_eq!(a, if k == idx { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn block_dimension_follows_mf() {
        let db = SpeciesDb::builtin();
        let l = db.level("lu175", "3D1").unwrap();
        assert_eq!(build_block(l, pr(3), 1.0).unwrap().dim(), 3);
        assert_eq!(build_block(l, pr(7), 1.0).unwrap().dim(), 2);
        assert_eq!(build_block(l, pr(9), 1.0).unwrap().dim(), 1);
        assert!(build_block(l, pr(11), 1.0).is_err());
        assert!(build_block(l, pr(2), 1.0).is_err());
        assert!(build_block(l, pr(3), -1.0).is_err());
    }

    #[test]
    fn diagonal_jz_matches_lande_projection() {
        // ⟨F mF| gJ Jz + gI Iz |F mF⟩ = gF mF
        let db = SpeciesDb::builtin();
        let l = db.level("lu175", "3D1").unwrap();
        for f in l.f_values() {
            for mf in f.projections() {
                let jz = jz_element(l.i, l.j, f, f, mf).unwrap();
                let iz = mf.value() - jz;
                let direct = l.g_j * jz + l.g_i * iz;
                assert!((direct - l.g_f(f) * mf.value()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn jz_couples_only_adjacent_f() {
        let (i, j) = (am(9), am(5));
        let e = jz_element(i, j, am(4), am(8), pr(0)).unwrap();
        assert!(e.abs() < 1e-15);
        assert!(jz_element(i, j, am(4), am(6), pr(0)).unwrap().abs() > 0.1);
    }

    #[test]
    fn linear_only_level_has_constant_slope() {
        // no hyperfine coupling and gJ = gI: H2 vanishes
        let mut l = LevelSpec::bare("toy", am(3), am(2), 0.7, 0.7);
        l.a_hf = 1.0e9;
        let st = StateSpec::new(&l, am(3), pr(3)).unwrap();
        let ground = LevelSpec::bare("g", am(3), am(0), 0.0, 0.7);
        let gs = StateSpec::new(&ground, am(3), pr(1)).unwrap();
        let t = Transition::new(gs, st).unwrap();
        let expected = (l.g_f(am(3)) * 1.5 - 0.7 * 0.5) * CONSTANTS.mu_b_over_h;
        for b in [0.5, 10.0, 1000.0] {
            let d = dnu_db(&t, b, None).unwrap();
            assert!((d.value - expected).abs() < 1e-6 * expected.abs(), "{} {expected}", d.value);
        }
    }

    #[test]
    fn step_below_zero_field_is_rejected() {
        let db = SpeciesDb::builtin();
        let g = db.level("lu176", "1S0").unwrap();
        let e = db.level("lu176", "3D1").unwrap();
        let t = Transition::new(
            StateSpec::new(g, am(14), pr(0)).unwrap(),
            StateSpec::new(e, am(14), pr(0)).unwrap(),
        )
        .unwrap();
        assert!(matches!(dnu_db(&t, 0.0, None), Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn mismatched_nuclear_g_rejected() {
        let db = SpeciesDb::builtin();
        let g = db.level("lu176", "1S0").unwrap();
        let e = db.level("lu175", "3D1").unwrap();
        let r = Transition::new(
            StateSpec::new(g, am(14), pr(0)).unwrap(),
            StateSpec::new(e, am(5), pr(1)).unwrap(),
        );
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn labels_unique_deep_in_paschen_back() {
        let db = SpeciesDb::builtin();
        let l = db.level("lu175", "3D1").unwrap();
        let b = build_block(l, pr(3), 2.0e5).unwrap();
        let mut labels: Vec<_> = b.eigenstates().iter().map(|s| s.f_label).collect();
        labels.dedup();
        assert_eq!(labels.len(), 3);
    }
}
