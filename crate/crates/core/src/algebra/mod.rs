//! Numeric substrate: exact rationals, binary extension fields and dense matrices over them.

pub mod gf;
pub mod matrix;
pub mod rational;

pub use gf::{FieldElement, GaloisField};
pub use matrix::{FieldMatrix, SolveError};
pub use rational::{Rational, RationalExt};
