//! Averaging schemes: weighted sets of optical transitions whose mean is the
//! reference frequency.
//!
//! When the excited states of a scheme cover every hyperfine level `F'` of a
//! fine-structure level at one `m_F'` with equal weight, the mean is free of
//! hyperfine-induced Zeeman mixing and of the quadrupole shift. What remains
//! is linear, `gI Δm μB B`.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::angular::{AngularMomentum, Projection};
use crate::constants::CONSTANTS;
use crate::error::{Error, Result};
use crate::fieldpoint::residual_quadratic_coefficient;
use crate::quadrupole::{quad_shift, TrapGeometry};
use crate::scalar::Real;
use crate::species::{read_text, DataFile, LevelSpec, RawScheme, RawStateRef, SpeciesDb, Strictness};
use crate::zeeman::{build_block, PreparedTransition, StateSpec, Transition};

/// Exact transition weight.
pub type Weight = Ratio<i64>;

/// `|level, F, m_F⟩` by level label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateRef {
    pub level: String,
    pub f: AngularMomentum,
    pub mf: Projection,
}

impl StateRef {
    pub fn new(level: &str, f: AngularMomentum, mf: Projection) -> Self {
        Self {
            level: level.to_owned(),
            f,
            mf,
        }
    }

    fn from_twice(level: &str, two_f: u32, two_mf: i32) -> Self {
        Self::new(level, AngularMomentum::from_twice(two_f), Projection::from_twice(two_mf))
    }

    /// `<label>_F<2F>_mF<2mF>`.
    pub fn column_label(&self) -> String {
        format!("{}_F{}_mF{}", self.level, self.f.twice(), self.mf.twice())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeTransition {
    pub ground: StateRef,
    pub excited: StateRef,
    pub weight: Weight,
}

impl SchemeTransition {
    /// `<ground>-><excited>`.
    pub fn id(&self) -> String {
        format!("{}->{}", self.ground.column_label(), self.excited.column_label())
    }
}

/// A named, weighted set of transitions of one species.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AveragingScheme {
    pub name: String,
    pub species: String,
    pub transitions: Vec<SchemeTransition>,
    /// Effective `m_F' - m_F` of the averaged line.
    pub delta_m: Projection,
}

/// Keys accepted by [`builtin_scheme`].
pub const BUILTIN_SCHEMES: &[&str] = &["lu176_m0", "lu176_forbidden_m0", "lu175_fip", "sr87_m0"];

fn w(n: i64, d: i64) -> Weight {
    Ratio::new(n, d)
}

fn tr(ground: StateRef, excited: StateRef, weight: Weight) -> SchemeTransition {
    SchemeTransition {
        ground,
        excited,
        weight,
    }
}

/// The built-in schemes of the ¹⁷⁶Lu⁺, ¹⁷⁵Lu⁺ and ⁸⁷Sr⁺ clocks.
pub fn builtin_scheme(key: &str) -> Result<AveragingScheme> {
    let (species, delta_m, transitions) = match key {
        "lu176_m0" => (
            "lu176",
            0,
            [12, 14, 16]
                .map(|tf| {
                    tr(
                        StateRef::from_twice("1S0", 14, 0),
                        StateRef::from_twice("3D1", tf, 0),
                        w(1, 3),
                    )
                })
                .to_vec(),
        ),
        "lu176_forbidden_m0" => {
            let g = |tm| StateRef::from_twice("1S0", 14, tm);
            let e = |tf| StateRef::from_twice("3D1", tf, 0);
            (
                "lu176",
                0,
                vec![
                    tr(g(0), e(12), w(1, 3)),
                    tr(g(2), e(14), w(1, 6)),
                    tr(g(-2), e(14), w(1, 6)),
                    tr(g(0), e(16), w(1, 3)),
                ],
            )
        }
        "lu175_fip" => (
            "lu175",
            -2,
            [5, 7, 9]
                .map(|tf| {
                    tr(
                        StateRef::from_twice("1S0", 7, 5),
                        StateRef::from_twice("3D1", tf, 3),
                        w(1, 3),
                    )
                })
                .to_vec(),
        ),
        "sr87_m0" => (
            "sr87",
            0,
            (1..=3)
                .flat_map(|k: u32| {
                    [
                        tr(
                            StateRef::from_twice("2S1/2", 8, 0),
                            StateRef::from_twice("2D5/2", 4 * k, 0),
                            w(1, 6),
                        ),
                        tr(
                            StateRef::from_twice("2S1/2", 10, 0),
                            StateRef::from_twice("2D5/2", 4 * k + 2, 0),
                            w(1, 6),
                        ),
                    ]
                })
                .collect(),
        ),
        _ => return Err(Error::UnknownScheme(key.to_owned())),
    };
    let scheme = AveragingScheme {
        name: key.to_owned(),
        species: species.to_owned(),
        transitions,
        delta_m: Projection::from_twice(delta_m),
    };
    scheme.check()?;
    Ok(scheme)
}

impl AveragingScheme {
    fn inconsistent(&self, message: impl Into<String>) -> Error {
        Error::InconsistentScheme {
            name: self.name.clone(),
            message: message.into(),
        }
    }

    /// `Σ w (m_F' - m_F)`, which must be a half-integer.
    pub fn inferred_delta_m(&self) -> Result<Projection> {
        let twice: Weight = self
            .transitions
            .iter()
            .map(|t| t.weight * i64::from(t.excited.mf.twice() - t.ground.mf.twice()))
            .sum();
        if !twice.is_integer() {
            return Err(self.inconsistent(format!(
                "weighted Δm = {}/{} is not a half-integer",
                twice,
                2
            )));
        }
        Ok(Projection::from_twice(twice.to_integer() as i32))
    }

    /// Checks weights (positive, summing to 1), distinct transitions and Δm.
    pub fn check(&self) -> Result<()> {
        if self.transitions.is_empty() {
            return Err(self.inconsistent("no transitions"));
        }
        let mut total = Weight::zero();
        for (n, t) in self.transitions.iter().enumerate() {
            if *t.weight.numer() <= 0 {
                return Err(self.inconsistent(format!("weight of transition {n} is not positive")));
            }
            if self.transitions[..n]
                .iter()
                .any(|o| o.ground == t.ground && o.excited == t.excited)
            {
                return Err(self.inconsistent(format!("transition {} listed twice", t.id())));
            }
            total += t.weight;
        }
        if total != Weight::from_integer(1) {
            return Err(self.inconsistent(format!("weights sum to {total}, not 1")));
        }
        let inferred = self.inferred_delta_m()?;
        if inferred != self.delta_m {
            return Err(self.inconsistent(format!(
                "declared Δm = {} but the transitions give {}",
                self.delta_m, inferred
            )));
        }
        Ok(())
    }

    /// Looks up every level and validates the states.
    pub fn resolve<'a>(&'a self, db: &'a SpeciesDb) -> Result<ResolvedScheme<'a>> {
        self.check()?;
        let mut components = Vec::with_capacity(self.transitions.len());
        for t in &self.transitions {
            let state = |s: &StateRef| -> Result<StateSpec<'a>> {
                StateSpec::new(db.level(&self.species, &s.level)?, s.f, s.mf)
            };
            components.push(Component {
                transition: Transition::new(state(&t.ground)?, state(&t.excited)?)?,
                weight: t.weight,
                id: t.id(),
            });
        }
        Ok(ResolvedScheme {
            scheme: self,
            components,
        })
    }

    fn from_raw(raw: &RawScheme) -> Result<Self> {
        let inconsistent = |message: String| Error::InconsistentScheme {
            name: raw.name.clone(),
            message,
        };
        let state = |s: &RawStateRef| -> Result<StateRef> {
            let f = AngularMomentum::try_from_twice(s.1).map_err(|e| inconsistent(e.to_string()))?;
            let mf = i32::try_from(s.2).map_err(|_| inconsistent(format!("twoMF {} out of range", s.2)))?;
            Ok(StateRef::new(&s.0, f, Projection::from_twice(mf)))
        };
        let mut transitions = Vec::with_capacity(raw.transitions.len());
        for t in &raw.transitions {
            let (n, d) = t.weight;
            if d <= 0 {
                return Err(inconsistent(format!("weight denominator {d} must be positive")));
            }
            transitions.push(SchemeTransition {
                ground: state(&t.ground)?,
                excited: state(&t.excited)?,
                weight: Ratio::new(n, d),
            });
        }
        let delta_m = i32::try_from(raw.delta_m_twice)
            .map_err(|_| inconsistent(format!("delta_m_twice {} out of range", raw.delta_m_twice)))?;
        let scheme = Self {
            name: raw.name.clone(),
            species: raw.species.clone(),
            transitions,
            delta_m: Projection::from_twice(delta_m),
        };
        scheme.check()?;
        Ok(scheme)
    }
}

/// Species and schemes from one JSON document.
#[derive(Clone, Debug, Default)]
pub struct Document {
    /// Species defined in the document only, not merged with built-ins.
    pub species: SpeciesDb,
    pub schemes: Vec<AveragingScheme>,
}

impl Document {
    pub fn parse(text: &str, mode: Strictness) -> Result<Self> {
        let file = DataFile::parse(text, mode)?;
        Ok(Self {
            species: file.species_db()?,
            schemes: file.schemes.iter().map(AveragingScheme::from_raw).collect::<Result<_>>()?,
        })
    }
}

/// Reads a document that may hold species, schemes or both.
pub fn load_document(path: impl AsRef<Path>, mode: Strictness) -> Result<Document> {
    Document::parse(&read_text(path.as_ref())?, mode)
}

/// One weighted transition of a resolved scheme.
#[derive(Clone, Debug)]
pub struct Component<'a> {
    pub transition: Transition<'a>,
    pub weight: Weight,
    pub id: String,
}

impl Component<'_> {
    pub fn weight_f64(&self) -> f64 {
        self.weight.to_f64().expect("finite weight")
    }

    /// `c_excited - c_ground` of the residual fine-structure term `c B²`,
    /// zero for levels without fine-structure data, Hz/G².
    pub fn fs_coefficient(&self) -> f64 {
        let c = |l: &LevelSpec| residual_quadratic_coefficient(l).unwrap_or(0.0);
        c(self.transition.excited.level) - c(self.transition.ground.level)
    }
}

/// Coverage of the hyperfine manifolds by a scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Completeness {
    /// Every excited `(level, m_F')` group covers all `2J+1` levels `F'` with equal weight.
    pub excited: bool,
    /// The same for the ground states.
    pub ground: bool,
}

/// A scheme whose states have been looked up in a species table.
#[derive(Clone, Debug)]
pub struct ResolvedScheme<'a> {
    pub scheme: &'a AveragingScheme,
    pub components: Vec<Component<'a>>,
}

fn side_complete<'a>(entries: impl Iterator<Item = (StateSpec<'a>, Weight)>) -> bool {
    type Key<'a> = (&'a str, Projection);
    let mut groups: BTreeMap<Key<'a>, (&'a LevelSpec, BTreeMap<AngularMomentum, Weight>)> = BTreeMap::new();
    for (s, wt) in entries {
        let entry = groups
            .entry((s.level.label.as_str(), s.mf))
            .or_insert_with(|| (s.level, BTreeMap::new()));
        *entry.1.entry(s.f).or_insert_with(Weight::zero) += wt;
    }
    groups.values().all(|(level, by_f)| {
        let full = level.i.twice() >= level.j.twice()
            && by_f.len() == level.j.multiplicity() as usize
            && level.f_values().all(|f| by_f.contains_key(&f));
        let first = by_f.values().next().copied();
        full && by_f.values().all(|&x| Some(x) == first)
    })
}

impl<'a> ResolvedScheme<'a> {
    pub fn completeness(&self) -> Completeness {
        Completeness {
            excited: side_complete(self.components.iter().map(|c| (c.transition.excited, c.weight))),
            ground: side_complete(self.components.iter().map(|c| (c.transition.ground, c.weight))),
        }
    }

    /// `gI Δm μB/h`, the linear slope of a complete scheme, Hz/G.
    pub fn expected_slope(&self) -> f64 {
        let g_i = self.components[0].transition.excited.level.g_i;
        g_i * self.scheme.delta_m.value() * CONSTANTS.mu_b_over_h
    }

    /// `Σ w (c_excited - c_ground)`, Hz/G².
    pub fn fs_coefficient(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight_f64() * c.fs_coefficient())
            .sum()
    }

    pub fn prepare<T: Real>(&self) -> Result<PreparedScheme<'a, T>> {
        let components = self
            .components
            .iter()
            .map(|c| {
                Ok(PreparedComponent {
                    transition: c.transition.prepare()?,
                    weight: T::lit(c.weight_f64()),
                    fs_coefficient: T::lit(c.fs_coefficient()),
                })
            })
            .collect::<Result<_>>()?;
        Ok(PreparedScheme { components })
    }
}

#[derive(Clone, Debug)]
pub struct PreparedComponent<'a, T> {
    pub transition: PreparedTransition<'a, T>,
    pub weight: T,
    pub fs_coefficient: T,
}

/// A resolved scheme with every Zeeman block template built once.
#[derive(Clone, Debug)]
pub struct PreparedScheme<'a, T> {
    pub components: Vec<PreparedComponent<'a, T>>,
}

impl<T: Real> PreparedScheme<'_, T> {
    /// `Σ w ν_k(B)`, Hz, relative to the hyperfine centroids.
    pub fn frequency(&self, field: T) -> Result<T> {
        self.weighted(|c| c.transition.frequency(field))
    }

    /// `Σ w (ν_k(B) - ν_k(0))`, Hz.
    pub fn shift(&self, field: T) -> Result<T> {
        self.weighted(|c| c.transition.shift(field))
    }

    /// Exact `d/dB Σ w ν_k`, Hz/G.
    pub fn slope(&self, field: T) -> Result<T> {
        self.weighted(|c| c.transition.slope(field))
    }

    /// Component shifts `ν_k(B) - ν_k(0)`, Hz.
    pub fn component_shifts(&self, field: T) -> Result<Vec<T>> {
        self.components.iter().map(|c| c.transition.shift(field)).collect()
    }

    /// Component shifts including the residual fine-structure term, Hz.
    pub fn component_shifts_with_fs(&self, field: T) -> Result<Vec<T>> {
        self.components
            .iter()
            .map(|c| Ok(c.transition.shift(field)? + c.fs_coefficient * field * field))
            .collect()
    }

    /// [`Self::shift`] plus the residual fine-structure term, Hz.
    pub fn shift_with_fs(&self, field: T) -> Result<T> {
        self.weighted(|c| Ok(c.transition.shift(field)? + c.fs_coefficient * field * field))
    }

    fn weighted(&self, mut f: impl FnMut(&PreparedComponent<'_, T>) -> Result<T>) -> Result<T> {
        let mut sum = T::zero();
        for c in &self.components {
            sum = sum + c.weight * f(c)?;
        }
        Ok(sum)
    }
}

/// `Σ w ν_k(B)` of a scheme, Hz.
pub fn avg_frequency(scheme: &AveragingScheme, db: &SpeciesDb, field: f64) -> Result<f64> {
    scheme.resolve(db)?.prepare::<f64>()?.frequency(field)
}

/// `(1/(2J+1)) Σ_F gF`, equal to `gI` whenever `I ≥ J`.
pub fn g_f_average(level: &LevelSpec) -> f64 {
    let fs: Vec<_> = level.f_values().collect();
    fs.iter().map(|&f| level.g_f(f)).sum::<f64>() / f64::from(level.j.multiplicity())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One pass/fail entry of a verification report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub measured: f64,
    pub threshold: f64,
}

impl Check {
    /// Passes when `measured ≤ threshold`.
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        let status = if measured <= threshold {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            name: name.into(),
            status,
            measured,
            threshold,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// `|dν/dB|` of every component at one field.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSlopes {
    pub b_gauss: f64,
    pub slopes_hz_per_gauss: Vec<f64>,
}

/// Outcome of [`verify_scheme`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchemeReport {
    pub scheme: String,
    pub component_ids: Vec<String>,
    pub completeness: Completeness,
    /// Slope of the average at `B → 0⁺`, Hz/G.
    pub linear_slope: f64,
    /// `gI Δm μB/h`, Hz/G.
    pub expected_slope: f64,
    /// Largest `|Σ w (q_excited - q_ground)|` over the geometries, Hz.
    pub quadrupole_residual: f64,
    /// Largest single quadrupole shift entering the residual, Hz.
    pub quadrupole_scale: f64,
    pub component_slopes: Vec<GridSlopes>,
    /// Number of individual sum-rule evaluations.
    pub sum_rule_evaluations: usize,
    pub checks: Vec<Check>,
}

impl SchemeReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

/// Relative tolerance of the cancellation checks.
pub const THEOREM_TOLERANCE: f64 = 1e-9;
/// Relative tolerance of the quadrupole sum rules.
pub const SUM_RULE_TOLERANCE: f64 = 1e-12;

/// Field at which the `B → 0⁺` slope is evaluated, G.
const SLOPE_PROBE_GAUSS: f64 = 1e-3;

fn levels_of<'a>(resolved: &ResolvedScheme<'a>) -> Vec<&'a LevelSpec> {
    let mut out: Vec<&LevelSpec> = Vec::new();
    for c in &resolved.components {
        for l in [c.transition.ground.level, c.transition.excited.level] {
            if !out.iter().any(|x| x.label == l.label) {
                out.push(l);
            }
        }
    }
    out
}

/// Checks the two cancellation theorems on a scheme and the quadrupole sum
/// rules on its levels. Failures are report entries, not errors.
pub fn verify_scheme(
    resolved: &ResolvedScheme<'_>,
    geometries: &[TrapGeometry<f64>],
    b_grid: &[f64],
) -> Result<SchemeReport> {
    let prepared = resolved.prepare::<f64>()?;
    let completeness = resolved.completeness();
    let mut checks = Vec::new();

    let declared = resolved.scheme.delta_m;
    checks.push(Check::at_most(
        "delta_m_consistency",
        (resolved.scheme.inferred_delta_m()?.value() - declared.value()).abs(),
        0.0,
    ));

    // linear Zeeman slope of the average
    let linear_slope = prepared.slope(SLOPE_PROBE_GAUSS)?;
    let expected_slope = resolved.expected_slope();
    let slope_scale = prepared
        .components
        .iter()
        .map(|c| c.transition.slope(SLOPE_PROBE_GAUSS).map(f64::abs))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(expected_slope.abs(), f64::max);
    checks.push(Check::at_most(
        "linear_zeeman_slope",
        (linear_slope - expected_slope).abs() / slope_scale.max(f64::MIN_POSITIVE),
        THEOREM_TOLERANCE,
    ));

    // the average stays linear in B over the grid
    let mut worst_linearity: f64 = 0.0;
    let mut component_slopes = Vec::with_capacity(b_grid.len());
    for &b in b_grid {
        let shifts = prepared.component_shifts(b)?;
        let avg: f64 = shifts
            .iter()
            .zip(&prepared.components)
            .map(|(s, c)| s * c.weight)
            .sum();
        let scale = shifts.iter().fold(expected_slope.abs() * b, |m, s| m.max(s.abs()));
        if scale > 0.0 {
            worst_linearity = worst_linearity.max((avg - expected_slope * b).abs() / scale);
        }
        component_slopes.push(GridSlopes {
            b_gauss: b,
            slopes_hz_per_gauss: prepared
                .components
                .iter()
                .map(|c| c.transition.slope(b).map(f64::abs))
                .collect::<Result<_>>()?,
        });
    }
    if !b_grid.is_empty() {
        checks.push(Check::at_most("average_linearity", worst_linearity, THEOREM_TOLERANCE));
    }

    // quadrupole residual of the weighted states
    let mut residual: f64 = 0.0;
    let mut quad_scale: f64 = 0.0;
    for g in geometries {
        let mut sum = 0.0;
        for c in &resolved.components {
            let q = |s: &StateSpec<'_>| quad_shift(s.level, s.f, s.mf, g).map(|q| q.value);
            let (qe, qg) = (q(&c.transition.excited)?, q(&c.transition.ground)?);
            quad_scale = quad_scale.max(qe.abs()).max(qg.abs());
            sum += c.weight_f64() * (qe - qg);
        }
        residual = residual.max(sum.abs());
    }
    let quad_relative = if quad_scale > 0.0 { residual / quad_scale } else { residual };
    checks.push(Check::at_most("quadrupole_residual", quad_relative, SUM_RULE_TOLERANCE));

    // zeeman trace theorem on every level block the scheme touches
    let mut trace_worst: f64 = 0.0;
    for level in levels_of(resolved) {
        if level.i.twice() < level.j.twice() {
            continue;
        }
        let lim = (level.i.twice() - level.j.twice()) as i32;
        for tm in (-lim..lim + 1).step_by(2) {
            let mf = Projection::from_twice(tm);
            for &b in b_grid {
                let states = build_block(level, mf, b)?.eigenstates();
                let n = states.len() as f64;
                let mean: f64 = states.iter().map(|s| s.shift).sum::<f64>() / n;
                let expected = mf.value() * level.g_i * CONSTANTS.mu_b_over_h * b;
                let scale = states.iter().fold(expected.abs(), |m, s| m.max(s.shift.abs()));
                if scale > 0.0 {
                    trace_worst = trace_worst.max((mean - expected).abs() / scale);
                }
            }
        }
    }
    checks.push(Check::at_most("zeeman_trace", trace_worst, THEOREM_TOLERANCE));

    // quadrupole sum rules on every level with J ≥ 1
    let mut evaluations = 0;
    let (mut worst_mf, mut worst_f): (f64, f64) = (0.0, 0.0);
    for level in levels_of(resolved).into_iter().filter(|l| l.j.twice() >= 2) {
        for g in geometries {
            for f in level.f_values() {
                let shifts = f
                    .projections()
                    .map(|mf| quad_shift(level, f, mf, g).map(|q| q.value))
                    .collect::<Result<Vec<_>>>()?;
                worst_mf = worst_mf.max(relative_sum(&shifts));
                evaluations += 1;
            }
            if level.i.twice() >= level.j.twice() {
                let lim = (level.i.twice() - level.j.twice()) as i32;
                for tm in (-lim..lim + 1).step_by(2) {
                    let mf = Projection::from_twice(tm);
                    let shifts = level
                        .f_values()
                        .map(|f| quad_shift(level, f, mf, g).map(|q| q.value))
                        .collect::<Result<Vec<_>>>()?;
                    worst_f = worst_f.max(relative_sum(&shifts));
                    evaluations += 1;
                }
            }
        }
    }
    checks.push(Check::at_most("quadrupole_sum_rule_mF", worst_mf, SUM_RULE_TOLERANCE));
    checks.push(Check::at_most("quadrupole_sum_rule_F", worst_f, SUM_RULE_TOLERANCE));

    Ok(SchemeReport {
        scheme: resolved.scheme.name.clone(),
        component_ids: resolved.components.iter().map(|c| c.id.clone()).collect(),
        completeness,
        linear_slope,
        expected_slope,
        quadrupole_residual: residual,
        quadrupole_scale: quad_scale,
        component_slopes,
        sum_rule_evaluations: evaluations,
        checks,
    })
}

/// `|Σ x| / max|x|`, or 0 for an all-zero list.
fn relative_sum(xs: &[f64]) -> f64 {
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        0.0
    } else {
        xs.iter().sum::<f64>().abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn db() -> SpeciesDb {
        SpeciesDb::builtin()
    }

    #[test]
    fn builtin_schemes_are_consistent() {
        let db = db();
        for key in BUILTIN_SCHEMES {
            let s = builtin_scheme(key).unwrap();
            let r = s.resolve(&db).unwrap();
            assert!(r.completeness().excited, "{key}");
            assert!(r.completeness().ground, "{key}");
        }
        assert!(matches!(builtin_scheme("nope"), Err(Error::UnknownScheme(_))));
    }

    #[test]
    fn lu175_delta_m_and_sr_weights() {
        assert_eq!(builtin_scheme("lu175_fip").unwrap().delta_m, Projection::integer(-1));
        let sr = builtin_scheme("sr87_m0").unwrap();
        assert_eq!(sr.transitions.len(), 6);
        assert!(sr.transitions.iter().all(|t| t.weight == w(1, 6)));
    }

    #[test]
    fn weights_must_sum_to_one() {
        let mut s = builtin_scheme("lu176_m0").unwrap();
        s.transitions.pop();
        assert!(matches!(s.check(), Err(Error::InconsistentScheme { .. })));
    }

    #[test]
    fn declared_delta_m_must_match() {
        let mut s = builtin_scheme("lu175_fip").unwrap();
        s.delta_m = Projection::ZERO;
        assert!(s.check().is_err());
    }

    #[test]
    fn dropping_a_level_breaks_completeness() {
        let db = db();
        let mut s = builtin_scheme("lu176_m0").unwrap();
        s.transitions.pop();
        for t in &mut s.transitions {
            t.weight = w(1, 2);
        }
        let r = s.resolve(&db).unwrap();
        assert!(!r.completeness().excited);
    }

    #[test]
    fn g_f_average_is_g_i() {
        let db = db();
        for (k, l) in [("lu176", "3D1"), ("lu175", "3D1"), ("sr87", "2D5/2"), ("sr87", "2S1/2")] {
            let level = db.level(k, l).unwrap();
            assert!((g_f_average(level) - level.g_i).abs() < 1e-12 * level.g_j.abs());
        }
        let small = LevelSpec::bare("x", AngularMomentum::from_twice(1), AngularMomentum::from_twice(3), 1.3, 1e-3);
        assert!((g_f_average(&small) - 1e-3).abs() > 1e-3);
    }

    #[test]
    fn lu176_average_stays_put() {
        let db = db();
        let s = builtin_scheme("lu176_m0").unwrap();
        let p = s.resolve(&db).unwrap().prepare::<f64>().unwrap();
        for b in [0.5, 10.0, 100.0] {
            assert!(p.shift(b).unwrap().abs() < 1e-6);
        }
    }

    #[test]
    fn scheme_document_round_trip() {
        let text = r#"{ "schemes": [ { "name": "one", "species": "lu176", "delta_m_twice": 0,
            "transitions": [ { "ground": ["1S0", 14, 0], "excited": ["3D1", 14, 0], "weight": [1, 1] } ] } ] }"#;
        let doc = Document::parse(text, Strictness::Strict).unwrap();
        assert_eq!(doc.schemes.len(), 1);
        let db = db();
        let r = doc.schemes[0].resolve(&db).unwrap();
        let t = r.components[0].transition;
        let direct = t.frequency(3.0).unwrap();
        assert_eq!(r.prepare::<f64>().unwrap().frequency(3.0).unwrap(), direct);
    }
}
