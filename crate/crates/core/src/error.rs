use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid quantum number: {0}")]
    InvalidQuantumNumber(String),

    #[error("F = {f} outside the allowed range for level {level}")]
    FOutOfRange { level: String, f: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid value for `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("unknown species `{0}`")]
    UnknownSpecies(String),

    #[error("unknown level `{level}` in species `{species}`")]
    UnknownLevel { species: String, level: String },

    #[error("unknown averaging scheme `{0}`")]
    UnknownScheme(String),

    #[error("inconsistent scheme `{name}`: {message}")]
    InconsistentScheme { name: String, message: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("level {0} has no fine-structure partner data")]
    MissingFsPartner(String),

    #[error("no field-independent point for this Δm sign (analytic B* = {b_star} G)")]
    NoFieldIndependentPoint { b_star: f64 },

    #[error("no sign change of d(avg)/dB on [{lo}, {hi}] G")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("derivative noise floor exceeded; best bracket [{lo}, {hi}] G")]
    NoiseFloor { lo: f64, hi: f64 },

    #[error("finite-difference step {h} G reaches below zero field at B = {b} G")]
    StepTooLarge { b: f64, h: f64 },

    #[error("no dressed state labelled F = {f} in block mF = {mf} of level {level}")]
    LabelNotFound { level: String, f: String, mf: String },
}

impl Error {
    /// Errors caused by user input (files, keys, ranges) rather than physics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Validation { .. }
                | Error::Io { .. }
                | Error::UnknownSpecies(_)
                | Error::UnknownLevel { .. }
                | Error::UnknownScheme(_)
                | Error::InconsistentScheme { .. }
        )
    }
}
