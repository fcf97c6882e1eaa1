//! Grid-refinement studies: run a solver on a ladder of grids against an
//! exact reference and report observed convergence orders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::solver::fast1d::{solve_fast1d, ParabolicConfig, TimeScheme};
use crate::solver::fast2d::{solve_fast2d, Fast2dProblem};
use crate::solver::grid::Grid1D;
use crate::solver::liouville::{solve_liouville, EllipticProblem};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub equation: String,
    /// Nodes per side, coarse to fine.
    pub grids: Vec<usize>,
    /// Max-norm errors against the exact reference, one per grid.
    pub errors: Vec<f64>,
    /// Observed orders ln(e_c/e_f)/ln(h_c/h_f) between successive rungs.
    pub orders: Vec<f64>,
    pub max_newton_iters: usize,
}

/// Observed orders between successive rungs: ln(e_c/e_f) / ln(h_c/h_f),
/// which reduces to log₂ of the error ratio when each rung halves h.
pub fn observed_orders(grids: &[usize], errors: &[f64]) -> Vec<f64> {
    grids
        .windows(2)
        .zip(errors.windows(2))
        .map(|(n, e)| {
            let h_ratio = (n[1] - 1) as f64 / (n[0] - 1) as f64;
            (e[0] / e[1]).ln() / h_ratio.ln()
        })
        .collect()
}

fn check_ladder(grids: &[usize]) -> Result<()> {
    if grids.len() < 2 {
        return Err(Error::SolverInput(
            "a convergence study needs at least two grids".into(),
        ));
    }
    for w in grids.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::SolverInput(format!(
                "grid ladder must refine: {} does not refine {}",
                w[1], w[0]
            )));
        }
    }
    if grids.iter().any(|&n| n < 3) {
        return Err(Error::SolverInput("grids need at least 3 nodes".into()));
    }
    Ok(())
}

/// Refinement study for the reduced one-dimensional march. The time step
/// scales with h (dt = dt_coeff · h) so the temporal and spatial error
/// orders line up in a single observed rate.
pub fn study_fast1d(
    reference: &Field,
    range: (f64, f64),
    grids: &[usize],
    t0: f64,
    t1: f64,
    dt_coeff: f64,
    scheme: TimeScheme,
) -> Result<ConvergenceReport> {
    check_ladder(grids)?;
    if !(dt_coeff.is_finite() && dt_coeff > 0.0) {
        return Err(Error::SolverInput(format!("bad dt coefficient {dt_coeff}")));
    }
    let mut errors = Vec::new();
    let mut max_newton = 0usize;
    for &n in grids {
        let grid = Grid1D::new(range.0, range.1, n)?;
        let h = grid.h();
        let cfg = ParabolicConfig::new(t0, t1, dt_coeff * h)?.with_scheme(scheme);
        let sol = solve_fast1d(reference, grid, &cfg)?;
        errors.push(sol.max_error);
        max_newton = max_newton.max(sol.max_newton_iters);
    }
    Ok(ConvergenceReport {
        equation: "fast1d".into(),
        grids: grids.to_vec(),
        orders: observed_orders(grids, &errors),
        errors,
        max_newton_iters: max_newton,
    })
}

/// Refinement study for the plane march on square n×n grids, dt = dt_coeff · h.
pub fn study_fast2d(
    problem: &Fast2dProblem,
    grids: &[usize],
    t0: f64,
    t1: f64,
    dt_coeff: f64,
) -> Result<ConvergenceReport> {
    check_ladder(grids)?;
    if !(dt_coeff.is_finite() && dt_coeff > 0.0) {
        return Err(Error::SolverInput(format!("bad dt coefficient {dt_coeff}")));
    }
    let mut errors = Vec::new();
    let mut max_newton = 0usize;
    for &n in grids {
        let h = (problem.rect[1] - problem.rect[0]) / (n - 1) as f64;
        let cfg = ParabolicConfig::new(t0, t1, dt_coeff * h)?;
        let sol = solve_fast2d(problem, n, n, &cfg)?;
        errors.push(sol.max_error);
        max_newton = max_newton.max(sol.max_newton_iters);
    }
    Ok(ConvergenceReport {
        equation: if problem.weight.is_some() {
            "weighted".into()
        } else if problem.sink != 0.0 {
            "sink".into()
        } else {
            "fast2d".into()
        },
        grids: grids.to_vec(),
        orders: observed_orders(grids, &errors),
        errors,
        max_newton_iters: max_newton,
    })
}

/// Refinement study for the elliptic Newton solver on square n×n grids.
pub fn study_elliptic(
    problem: &EllipticProblem,
    grids: &[usize],
    tol: f64,
    max_iter: usize,
) -> Result<ConvergenceReport> {
    check_ladder(grids)?;
    let mut errors = Vec::new();
    let mut max_newton = 0usize;
    for &n in grids {
        let sol = solve_liouville(problem, n, n, tol, max_iter)?;
        errors.push(sol.max_error);
        max_newton = max_newton.max(sol.newton_iters);
    }
    Ok(ConvergenceReport {
        equation: "liouville".into(),
        grids: grids.to_vec(),
        orders: observed_orders(grids, &errors),
        errors,
        max_newton_iters: max_newton,
    })
}
