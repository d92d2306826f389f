//! Finite relational structures, leveled points, permutation codings and
//! D-relation towers.

pub mod error;
pub mod scalar;
pub mod leveled;
pub mod perm;
pub mod structure;
pub mod tower;

pub use error::{Error, Result};
pub use scalar::Level;
pub use structure::{FinStructure, Signature};

/// Exact rational levels.
pub type Rational = num_rational::Ratio<i64>;

/// A leveled point with rational positions.
pub type Point = leveled::LeveledPoint<Rational>;
