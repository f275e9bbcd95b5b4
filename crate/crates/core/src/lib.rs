//! Exact arithmetic for higher antibrackets.
//!
//! The crate computes the hierarchy `Phi^n_f` of a linear operator on a
//! finite-dimensional free superalgebra by four independent routes, the
//! Nijenhuis-Richardson bracket that organizes them, the Koszul numbers that
//! appear in their universal Lie formula, and the coefficients of the standard
//! form `Phi^(n+1)_f = (c_1 rho_1^n + ... + c_n rho_n) f`.
//!
//! Everything is exact: coefficients are [`Rational`], and operators are
//! compared as complete tables.

pub mod algebra;
pub mod antibrackets;
pub mod combinatorics;
pub mod exec;
pub mod error;
pub mod linalg;
pub mod multiop;
pub mod rational;
pub mod series;
pub mod universal;

pub use error::{Error, Result};
pub use rational::Rational;
