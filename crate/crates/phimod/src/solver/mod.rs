//! Solving algebraic functional equations as polynomials in Φ modulo p^γ.

mod base;
mod equation;
pub mod fpoly;
mod lift;
mod linsolve;
mod series;

pub use base::{default_window, find_base};
pub use equation::{EqTerm, EquationSpec, FunctionalEquation};
pub use lift::{default_cert_order, lift, solve, verify_base, LiftReport, LiftReportJson, StepLog};
pub use linsolve::{determinant, diagonal_monomial, linear_solve, solve_with_det};
pub use series::{series_solution, series_solution_exact};
