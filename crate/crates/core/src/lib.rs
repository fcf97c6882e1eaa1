//! Closed-form solutions of plane logarithmic diffusion and Liouville-type
//! equations, the conjugate-pair transformations that generate them, and
//! independent residual oracles plus reference numerical solvers used to
//! validate both.
//!
//! The crate is organized around one pipeline:
//!
//! 1. [`analytic`] supplies exact expression trees, symbolic
//!    differentiation, and conjugate harmonic pairs.
//! 2. [`catalog`] ships the built-in closed-form solutions.
//! 3. [`transform`] maps verified solutions into new ones.
//! 4. [`verify`] measures equation residuals by routes independent of the
//!    construction algebra.
//! 5. [`solver`] provides reference numerical schemes whose convergence is
//!    validated against the exact catalog.

pub mod analytic;
pub mod catalog;
pub mod error;
pub mod field;
pub mod sample;
pub mod solver;
pub mod transform;
pub mod verify;

pub use analytic::expr::{Expr, Func, Point};
pub use analytic::pair::{harmonic_pair, HarmonicPair, PairKind};
pub use analytic::singular::SingularSet;
pub use catalog::{EquationTag, SolutionEntry};
pub use error::{Error, Result};
pub use field::Field;
pub use sample::{Domain, SampleSpec};
pub use verify::{PlaneField, ResidualReport};
