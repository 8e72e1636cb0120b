//! Counterexamples to unprovable equations.
//!
//! Inequivalent canonical forms are separated by polynomial environments
//! built from a natural point that separates their node polynomials and a
//! Hermite interpolant per function variable. Rational coefficients are then
//! traded for natural ones by a second point search.

mod construct;
mod enumerate;
mod hermite;
mod linalg;
mod search;

pub use construct::{
    build_separation, counterexample, counterexample_preferring_small, naturalize, Counterexample,
    NotSeparated, Separation,
};
pub use enumerate::{enum_counterexample, BudgetExhausted};
pub use hermite::{hermite_solve, satisfies, HermiteError, HermiteProblem};
pub use linalg::solve as solve_linear;
pub use search::{separate_polys, NotSeparable};
