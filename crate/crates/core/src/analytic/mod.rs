//! Expression algebra, conjugate harmonic pairs, and singular sets.

pub mod expr;
pub mod pair;
pub mod sexpr;
pub mod singular;

pub use expr::{Expr, Func, Point};
pub use pair::{
    cauchy_riemann_residual, grad_sq, harmonic_pair, lemma1_residual, orthogonality_residual,
    HarmonicPair, LogGradLaplacian, PairKind,
};
pub use singular::{SingularSet, DEFAULT_MARGIN, GRAD_FLOOR};
