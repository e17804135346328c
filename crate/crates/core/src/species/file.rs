//! JSON envelope shared by species and scheme files.
//!
//! ```json
//! { "species": { "<key>": { "gI": -2.46e-4, "levels": [ { "label": "3D1", "twoI": 14,
//!     "twoJ": 2, "gJ": 0.5, "A_hf_Hz": ..., "B_hf_Hz": ..., "theta_q_ea02": ...,
//!     "fs_partner": { "omega_fs_rad_s": ..., "gL": 1, "gS": 2 } } ] } },
//!   "schemes": [ { "name": "...", "species": "lu175", "delta_m_twice": -2,
//!     "transitions": [ { "ground": ["1S0", 7, 5], "excited": ["3D1", 5, 3], "weight": [1, 3] } ] } ] }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{FsPartner, Isotope, LevelSpec, SpeciesDb};
use crate::angular::AngularMomentum;
use crate::error::{Error, Result};

/// How unknown JSON keys are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Unknown keys are an error.
    #[default]
    Strict,
    /// Unknown keys are ignored.
    Lax,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct DataFile {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub species: BTreeMap<String, RawIsotope>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub schemes: Vec<RawScheme>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawIsotope {
    #[serde(rename = "gI")]
    g_i: f64,
    levels: Vec<RawLevel>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLevel {
    label: String,
    #[serde(rename = "twoI")]
    two_i: i64,
    #[serde(rename = "twoJ")]
    two_j: i64,
    #[serde(rename = "gJ")]
    g_j: f64,
    #[serde(rename = "A_hf_Hz")]
    a_hf_hz: f64,
    #[serde(rename = "B_hf_Hz")]
    b_hf_hz: f64,
    theta_q_ea02: f64,
    #[serde(default)]
    fs_partner: Option<RawFsPartner>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFsPartner {
    omega_fs_rad_s: f64,
    #[serde(rename = "gL")]
    g_l: f64,
    #[serde(rename = "gS")]
    g_s: f64,
}

/// `[level_label, twoF, twoMF]`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub(crate) struct RawStateRef(pub String, pub i64, pub i64);

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawTransition {
    pub ground: RawStateRef,
    pub excited: RawStateRef,
    pub weight: (i64, i64),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawScheme {
    pub name: String,
    pub species: String,
    pub delta_m_twice: i64,
    pub transitions: Vec<RawTransition>,
}

const ENVELOPE_KEYS: &[&str] = &["species", "schemes"];
const ISOTOPE_KEYS: &[&str] = &["gI", "levels"];
const LEVEL_KEYS: &[&str] = &[
    "label",
    "twoI",
    "twoJ",
    "gJ",
    "A_hf_Hz",
    "B_hf_Hz",
    "theta_q_ea02",
    "fs_partner",
    "provenance",
];
const FS_KEYS: &[&str] = &["omega_fs_rad_s", "gL", "gS"];
const SCHEME_KEYS: &[&str] = &["name", "species", "delta_m_twice", "transitions"];
const TRANSITION_KEYS: &[&str] = &["ground", "excited", "weight"];

fn retain_keys(v: &mut Value, keys: &[&str]) {
    if let Value::Object(map) = v {
        map.retain(|k, _| keys.contains(&k.as_str()));
    }
}

/// Drops every key the schema does not know about.
fn prune_unknown(root: &mut Value) {
    retain_keys(root, ENVELOPE_KEYS);
    if let Some(Value::Object(species)) = root.get_mut("species") {
        for iso in species.values_mut() {
            retain_keys(iso, ISOTOPE_KEYS);
            if let Some(Value::Array(levels)) = iso.get_mut("levels") {
                for level in levels {
                    retain_keys(level, LEVEL_KEYS);
                    if let Some(fs) = level.get_mut("fs_partner") {
                        retain_keys(fs, FS_KEYS);
                    }
                }
            }
        }
    }
    if let Some(Value::Array(schemes)) = root.get_mut("schemes") {
        for scheme in schemes {
            retain_keys(scheme, SCHEME_KEYS);
            if let Some(Value::Array(ts)) = scheme.get_mut("transitions") {
                for t in ts {
                    retain_keys(t, TRANSITION_KEYS);
                }
            }
        }
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

impl DataFile {
    pub fn parse(text: &str, mode: Strictness) -> Result<Self> {
        if text.trim().is_empty() {
            return Ok(Self::default());
        }
        match mode {
            Strictness::Strict => serde_json::from_str(text).map_err(parse_error),
            Strictness::Lax => {
                let mut v: Value = serde_json::from_str(text).map_err(parse_error)?;
                prune_unknown(&mut v);
                serde_json::from_value(v).map_err(parse_error)
            }
        }
    }

    pub fn species_db(&self) -> Result<SpeciesDb> {
        let mut entries = BTreeMap::new();
        for (key, raw) in &self.species {
            entries.insert(key.clone(), raw.to_isotope(key)?);
        }
        Ok(SpeciesDb { entries })
    }

    pub fn from_species(db: &SpeciesDb) -> Self {
        let species = db
            .entries
            .iter()
            .map(|(k, iso)| (k.clone(), RawIsotope::from_isotope(iso)))
            .collect();
        Self {
            species,
            schemes: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("data file serializes")
    }
}

fn validation(field: String, message: impl Into<String>) -> Error {
    Error::Validation {
        field,
        message: message.into(),
    }
}

impl RawIsotope {
    fn to_isotope(&self, key: &str) -> Result<Isotope> {
        if !self.g_i.is_finite() {
            return Err(validation(format!("{key}.gI"), "must be finite"));
        }
        let mut levels: Vec<LevelSpec> = Vec::with_capacity(self.levels.len());
        for (n, raw) in self.levels.iter().enumerate() {
            let field = |name: &str| format!("{key}.levels[{n}].{name}");
            let i = AngularMomentum::try_from_twice(raw.two_i)
                .map_err(|e| validation(field("twoI"), e.to_string()))?;
            let j = AngularMomentum::try_from_twice(raw.two_j)
                .map_err(|e| validation(field("twoJ"), e.to_string()))?;
            if levels.iter().any(|l| l.label == raw.label) {
                return Err(validation(field("label"), format!("duplicate label `{}`", raw.label)));
            }
            if let Some(first) = levels.first() {
                if first.i != i {
                    return Err(validation(
                        field("twoI"),
                        format!("nuclear spin differs from level `{}`", first.label),
                    ));
                }
            }
            let level = LevelSpec {
                label: raw.label.clone(),
                i,
                j,
                g_j: raw.g_j,
                g_i: self.g_i,
                a_hf: raw.a_hf_hz,
                b_hf: raw.b_hf_hz,
                theta_q: raw.theta_q_ea02,
                fs_partner: raw.fs_partner.as_ref().map(|fs| FsPartner {
                    omega_fs: fs.omega_fs_rad_s,
                    g_l: fs.g_l,
                    g_s: fs.g_s,
                }),
                provenance: raw.provenance.clone(),
            };
            level.validate().map_err(|e| match e {
                Error::Validation { field: f, message } => {
                    let name = f.rsplit_once('.').map_or(f.as_str(), |(_, n)| n).to_owned();
                    validation(format!("{key}.levels[{n}].{name}"), message)
                }
                other => other,
            })?;
            levels.push(level);
        }
        Ok(Isotope {
            g_i: self.g_i,
            levels,
        })
    }

    fn from_isotope(iso: &Isotope) -> Self {
        Self {
            g_i: iso.g_i,
            levels: iso
                .levels
                .iter()
                .map(|l| RawLevel {
                    label: l.label.clone(),
                    two_i: l.i.twice().into(),
                    two_j: l.j.twice().into(),
                    g_j: l.g_j,
                    a_hf_hz: l.a_hf,
                    b_hf_hz: l.b_hf,
                    theta_q_ea02: l.theta_q,
                    fs_partner: l.fs_partner.map(|fs| RawFsPartner {
                        omega_fs_rad_s: fs.omega_fs,
                        g_l: fs.g_l,
                        g_s: fs.g_s,
                    }),
                    provenance: l.provenance.clone(),
                })
                .collect(),
        }
    }
}
