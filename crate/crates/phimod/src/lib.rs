//! Generating functions modulo prime powers as polynomials in
//! Φ(z) = Σ_{n≥0} z^{p^n}, with exact coefficient extraction through the
//! H-series normal form.

pub mod applications;
pub mod cli;
pub mod dsl;
pub mod error;
pub mod hseries;
pub mod laurent;
pub mod minpoly;
pub mod modarith;
pub mod phipoly;
pub mod solver;

pub use error::{Error, Result};
pub use hseries::{Composition, HCombo};
pub use laurent::{LaurentPoly, TruncSeries};
pub use modarith::{Context, Residue};
pub use phipoly::PhiPoly;
pub use solver::{FunctionalEquation, LiftReport};
