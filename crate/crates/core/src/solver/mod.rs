//! Reference numerical solvers validated against the exact catalog.
//!
//! Each scheme is deliberately plain (second-order stencils, exact
//! Dirichlet data from a closed-form reference) so that a convergence
//! study against the catalog is a meaningful check of both: a bug in a
//! formula or a solver shows up as a broken observed order.

pub mod banded;
pub mod convergence;
pub mod fast1d;
pub mod fast2d;
pub mod grid;
pub mod liouville;
pub mod ode22;

pub use convergence::{observed_orders, study_elliptic, study_fast1d, study_fast2d, ConvergenceReport};
pub use fast1d::{solve_fast1d, Fast1dSolution, ParabolicConfig, TimeScheme};
pub use fast2d::{solve_fast2d, Fast2dProblem, Fast2dSolution};
pub use grid::{write_csv_1d, write_csv_2d, Grid1D, Grid2D};
pub use liouville::{solve_liouville, EllipticProblem, EllipticSolution};
pub use ode22::{integrate_ode22, AnsatzField, OdeParams, Profile, Trajectory};
