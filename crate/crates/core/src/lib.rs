//! Hyperfine Zeeman and electric-quadrupole shifts of trapped-ion clock
//! states, averaging schemes that cancel them, and field-independent points.
//!
//! Frequencies are in Hz (energies divided by `h`), fields in gauss. The
//! numerical core is generic over [`Real`]; the aliases below fix `f64`.

pub mod angular;
pub mod averaging;
pub mod constants;
pub mod error;
pub mod fieldpoint;
pub mod linalg;
pub mod numdiff;
pub mod quadrupole;
pub mod roots;
pub mod scalar;
pub mod species;
pub mod zeeman;

pub use angular::{AngularMomentum, Projection};
pub use averaging::{builtin_scheme, AveragingScheme, Weight};
pub use error::{Error, Result};
pub use scalar::Real;
pub use species::{LevelSpec, SpeciesDb};

/// A Zeeman block in double precision.
pub type Block<'a> = zeeman::ZeemanBlock<'a, f64>;
/// A dressed state in double precision.
pub type State = zeeman::DressedState<f64>;
/// Trap geometry in double precision.
pub type Geometry = quadrupole::TrapGeometry<f64>;
/// Symmetric matrix in double precision.
pub type Matrix = linalg::SquareMatrix<f64>;
