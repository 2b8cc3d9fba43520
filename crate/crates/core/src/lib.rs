//! Numerical evaluation of best-constant characterizations for weighted
//! Hardy-type inequalities restricted to non-increasing functions, and of
//! generalized maximal-operator norms between Lorentz-type spaces, together
//! with brute-force extremal search that certifies lower bounds on the true
//! constants.
//!
//! The building blocks are piecewise power-log [`weights`], non-increasing
//! [`stepfn`]s (the discretized rearrangement cone), exact-or-quadrature
//! [`norms`], the supremal operator and identity toolbox in [`operators`],
//! the background constant functionals in [`constants`], the main
//! characterizations in [`characterize`], and the extremal-search oracles in
//! [`verify`].

pub mod asym;
pub mod constants;
pub mod error;
pub mod gridfn;
pub mod norms;
pub mod operators;
pub mod quad;
pub mod stepfn;
pub mod weights;
pub mod xreal;

pub mod characterize;
pub mod verify;

pub use error::{Error, Result};
