//! Atomic species data: fine-structure levels, hyperfine constants and the
//! built-in isotope table.

mod file;

use std::collections::BTreeMap;
use std::path::Path;

use crate::angular::{coupled_range, AngularMomentum};
use crate::error::{Error, Result};

pub(crate) use file::{DataFile, RawScheme, RawStateRef};
pub use file::Strictness;

/// Dominant fine-structure neighbour of a level, used for the residual
/// quadratic Zeeman shift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FsPartner {
    /// Fine-structure splitting as an angular frequency, rad/s.
    pub omega_fs: f64,
    pub g_l: f64,
    pub g_s: f64,
}

/// One fine-structure level of one isotope.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSpec {
    pub label: String,
    pub i: AngularMomentum,
    pub j: AngularMomentum,
    pub g_j: f64,
    /// Nuclear g-factor in Bohr magnetons, shared by all levels of an isotope.
    /// The Zeeman term is `μB (gJ Jz + gI Iz) B`, so a positive nuclear
    /// moment gives a negative `gI`.
    pub g_i: f64,
    /// Magnetic-dipole hyperfine constant, Hz.
    pub a_hf: f64,
    /// Electric-quadrupole hyperfine constant, Hz.
    pub b_hf: f64,
    /// Atomic quadrupole moment Θ(J), e·a₀².
    pub theta_q: f64,
    pub fs_partner: Option<FsPartner>,
    pub provenance: Option<String>,
}

impl LevelSpec {
    /// A level with no hyperfine structure, quadrupole moment or fine-structure data.
    pub fn bare(label: &str, i: AngularMomentum, j: AngularMomentum, g_j: f64, g_i: f64) -> Self {
        Self {
            label: label.to_owned(),
            i,
            j,
            g_j,
            g_i,
            a_hf: 0.0,
            b_hf: 0.0,
            theta_q: 0.0,
            fs_partner: None,
            provenance: None,
        }
    }

    /// Total angular momenta `|I-J|, ..., I+J`.
    pub fn f_values(&self) -> impl DoubleEndedIterator<Item = AngularMomentum> + Clone {
        coupled_range(self.i, self.j)
    }

    pub fn admits_f(&self, f: AngularMomentum) -> bool {
        self.f_values().any(|x| x == f)
    }

    fn check_f(&self, f: AngularMomentum) -> Result<()> {
        if self.admits_f(f) {
            Ok(())
        } else {
            Err(Error::FOutOfRange {
                level: self.label.clone(),
                f: f.to_string(),
            })
        }
    }

    fn quadrupole_hyperfine_defined(&self) -> bool {
        self.i.twice() >= 2 && self.j.twice() >= 2
    }

    /// Zero-field hyperfine energy `E_F`, Hz, referenced to the hyperfine centroid.
    ///
    /// `E_F = A K/2 + B [3/2 K(K+1) - 2 I(I+1) J(J+1)] / [2I(2I-1) 2J(2J-1)]`
    /// with `K = F(F+1) - I(I+1) - J(J+1)`; the `B` term only for `I, J ≥ 1`.
    pub fn hyperfine_energy(&self, f: AngularMomentum) -> Result<f64> {
        self.check_f(f)?;
        Ok(self.hyperfine_energy_unchecked(f))
    }

    pub(crate) fn hyperfine_energy_unchecked(&self, f: AngularMomentum) -> f64 {
        let (ii, jj) = (self.i.casimir(), self.j.casimir());
        let k = f.casimir() - ii - jj;
        let mut e = self.a_hf * k / 2.0;
        if self.quadrupole_hyperfine_defined() {
            let (i, j) = (self.i.value(), self.j.value());
            let num = 1.5 * k * (k + 1.0) - 2.0 * ii * jj;
            let den = 2.0 * i * (2.0 * i - 1.0) * 2.0 * j * (2.0 * j - 1.0);
            e += self.b_hf * num / den;
        }
        e
    }

    /// Landé factor of the `F` manifold including the nuclear term:
    /// `gF = gJ [F(F+1)+J(J+1)-I(I+1)]/[2F(F+1)] + gI [F(F+1)+I(I+1)-J(J+1)]/[2F(F+1)]`.
    /// Zero for `F = 0`.
    pub fn g_f(&self, f: AngularMomentum) -> f64 {
        if f.twice() == 0 {
            return 0.0;
        }
        let (ff, ii, jj) = (f.casimir(), self.i.casimir(), self.j.casimir());
        self.g_j * (ff + jj - ii) / (2.0 * ff) + self.g_i * (ff + ii - jj) / (2.0 * ff)
    }

    /// Checks the level invariants; `field` paths in errors name the JSON key.
    pub fn validate(&self) -> Result<()> {
        let fail = |field: &str, message: String| {
            Err(Error::Validation {
                field: format!("{}.{}", self.label, field),
                message,
            })
        };
        for (name, v) in [
            ("gJ", self.g_j),
            ("gI", self.g_i),
            ("A_hf_Hz", self.a_hf),
            ("B_hf_Hz", self.b_hf),
            ("theta_q_ea02", self.theta_q),
        ] {
            if !v.is_finite() {
                return fail(name, format!("{v} is not finite"));
            }
        }
        if !self.quadrupole_hyperfine_defined() && self.b_hf != 0.0 {
            return fail(
                "B_hf_Hz",
                format!("must be 0 when I < 1 or J < 1 (I = {}, J = {})", self.i, self.j),
            );
        }
        if self.j.twice() < 2 && self.theta_q != 0.0 {
            return fail("theta_q_ea02", format!("must be 0 when J < 1 (J = {})", self.j));
        }
        if let Some(fs) = &self.fs_partner {
            if !(fs.omega_fs.is_finite() && fs.omega_fs > 0.0) {
                return fail("fs_partner.omega_fs_rad_s", "must be positive".into());
            }
            if !(fs.g_l.is_finite() && fs.g_s.is_finite()) {
                return fail("fs_partner", "g-factors must be finite".into());
            }
        }
        Ok(())
    }
}

/// All levels of one isotope.
#[derive(Clone, Debug, PartialEq)]
pub struct Isotope {
    pub g_i: f64,
    pub levels: Vec<LevelSpec>,
}

impl Isotope {
    pub fn level(&self, label: &str) -> Option<&LevelSpec> {
        self.levels.iter().find(|l| l.label == label)
    }
}

/// Immutable table of isotopes keyed by species name (`"lu176"`, ...).
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SpeciesDb {
    pub entries: BTreeMap<String, Isotope>,
}

const BUILTIN_JSON: &str = include_str!("../../data/species.json");

impl SpeciesDb {
    /// Built-in ¹⁷⁶Lu⁺, ¹⁷⁵Lu⁺, ⁸⁷Sr⁺ and ⁸⁸Sr⁺ data.
    pub fn builtin() -> Self {
        Self::from_json_str(BUILTIN_JSON, Strictness::Strict)
            .expect("built-in species data is valid")
    }

    /// Parses and validates a species document without merging built-ins.
    pub fn from_json_str(text: &str, mode: Strictness) -> Result<Self> {
        DataFile::parse(text, mode)?.species_db()
    }

    /// `self` entries shadow `base` entries with the same key.
    pub fn merged_over(self, base: SpeciesDb) -> Self {
        let mut entries = base.entries;
        entries.extend(self.entries);
        Self { entries }
    }

    pub fn to_json(&self) -> String {
        DataFile::from_species(self).to_json()
    }

    pub fn isotope(&self, key: &str) -> Result<&Isotope> {
        self.entries
            .get(key)
            .ok_or_else(|| Error::UnknownSpecies(key.to_owned()))
    }

    pub fn level(&self, key: &str, label: &str) -> Result<&LevelSpec> {
        self.isotope(key)?.level(label).ok_or_else(|| Error::UnknownLevel {
            species: key.to_owned(),
            level: label.to_owned(),
        })
    }
}

/// Loads a species file and merges it over the built-ins. An empty file
/// yields the built-ins unchanged.
pub fn load_species(path: impl AsRef<Path>) -> Result<SpeciesDb> {
    load_species_with(path, Strictness::Strict)
}

pub fn load_species_with(path: impl AsRef<Path>, mode: Strictness) -> Result<SpeciesDb> {
    let text = read_text(path.as_ref())?;
    Ok(SpeciesDb::from_json_str(&text, mode)?.merged_over(SpeciesDb::builtin()))
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Unweighted mean of `E_F` over the given `F` values.
pub fn mean_hyperfine_energy(level: &LevelSpec, fs: &[AngularMomentum]) -> f64 {
    fs.iter().map(|&f| level.hyperfine_energy_unchecked(f)).sum::<f64>() / fs.len() as f64
}
