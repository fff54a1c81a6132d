//! Built-in equations, exact oracles, residue classification and the
//! blossom/Fuß–Catalan identities.

mod appendix;
mod builtins;
pub mod classify;
pub mod corollaries;
pub mod oracles;
pub mod patterns;

pub use appendix::{fuss_series, verify_appendix, AppendixReport};
pub use builtins::{blossom_terms, builtin, Builtin, BuiltinKind, BuiltinParams, BUILTIN_NAMES};
pub use classify::{classify, classify_at, verify_against_oracle, Mismatch, OracleCheck, ResidueTable, TableSource};
pub use oracles::{oracle_terms, Provenance, SequenceOracle};
pub use patterns::{Manifest, ManifestReport, Pattern};
