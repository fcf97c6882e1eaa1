//! Damped-Newton solver for the elliptic problem Δw = g(x,y) · exp(λw)
//! on a rectangle with Dirichlet data from an exact reference.

use crate::analytic::expr::{Expr, Point};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::solver::banded::BandedMatrix;
use crate::solver::grid::Grid2D;

#[derive(Debug, Clone)]
pub struct EllipticProblem<'a> {
    /// Exact steady reference over (x, y): boundary data and yardstick.
    pub reference: &'a Field,
    pub lambda: f64,
    /// Source factor g; `None` means g ≡ 1.
    pub source: Option<&'a Expr>,
    /// x0, x1, y0, y1.
    pub rect: [f64; 4],
}

#[derive(Debug, Clone)]
pub struct EllipticSolution {
    pub grid: Grid2D,
    /// w on the full grid, x fastest.
    pub values: Vec<f64>,
    pub max_error: f64,
    pub newton_iters: usize,
    /// ‖F‖∞ after each Newton update, strictly decreasing by line search.
    pub residual_trace: Vec<f64>,
}

pub fn solve_liouville(
    problem: &EllipticProblem,
    nx: usize,
    ny: usize,
    tol: f64,
    max_iter: usize,
) -> Result<EllipticSolution> {
    let sig = problem.reference.signature().to_vec();
    if sig != ["x", "y"] {
        return Err(Error::SolverInput(format!(
            "reference must be a steady field over (x, y), got {sig:?}"
        )));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::SolverInput(format!("bad tolerance {tol}")));
    }
    if problem.lambda == 0.0 || !problem.lambda.is_finite() {
        return Err(Error::SolverInput(format!(
            "lambda must be finite and nonzero, got {}",
            problem.lambda
        )));
    }
    let grid = Grid2D::new(problem.rect, nx, ny)?;
    let (inv_hx2, inv_hy2) = (
        1.0 / (grid.xs.h() * grid.xs.h()),
        1.0 / (grid.ys.h() * grid.ys.h()),
    );
    let n_int = grid.n_interior();
    let ix = nx - 2;
    let lambda = problem.lambda;

    // Boundary values and the flat interior start at their mean.
    let mut border = vec![0.0; nx * ny];
    let mut boundary_sum = 0.0;
    let mut boundary_count = 0usize;
    {
        let mut put = |i: usize, j: usize| -> Result<()> {
            let v = problem.reference.eval(&Point::of(&[
                ("x", grid.xs.x(i)),
                ("y", grid.ys.x(j)),
            ]))?;
            border[grid.idx(i, j)] = v;
            boundary_sum += v;
            boundary_count += 1;
            Ok(())
        };
        for i in 0..nx {
            put(i, 0)?;
            put(i, ny - 1)?;
        }
        for j in 1..ny - 1 {
            put(0, j)?;
            put(nx - 1, j)?;
        }
    }
    let mut w = vec![boundary_sum / boundary_count as f64; n_int];

    let mut g_int = vec![1.0; n_int];
    if let Some(g) = problem.source {
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let v = g.eval(&Point::of(&[("x", grid.xs.x(i)), ("y", grid.ys.x(j))]))?;
                if !v.is_finite() {
                    return Err(Error::SolverInput(format!("non-finite source value {v}")));
                }
                g_int[grid.interior_idx(i, j)] = v;
            }
        }
    }

    let residual = |w: &[f64]| -> Vec<f64> {
        let mut f = vec![0.0; n_int];
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let k = (j - 1) * ix + (i - 1);
                let c = w[k];
                let west = if i == 1 { border[j * nx + i - 1] } else { w[k - 1] };
                let east = if i == nx - 2 { border[j * nx + i + 1] } else { w[k + 1] };
                let south = if j == 1 { border[(j - 1) * nx + i] } else { w[k - ix] };
                let north = if j == ny - 2 { border[(j + 1) * nx + i] } else { w[k + ix] };
                let lap =
                    (west - 2.0 * c + east) * inv_hx2 + (south - 2.0 * c + north) * inv_hy2;
                f[k] = lap - g_int[k] * (lambda * c).exp();
            }
        }
        f
    };
    let norm = |f: &[f64]| f.iter().fold(0.0f64, |m, r| m.max(r.abs()));

    let mut fw = residual(&w);
    let mut fnorm = norm(&fw);
    let mut trace = vec![fnorm];
    let mut iters = 0usize;

    while fnorm >= tol {
        if iters >= max_iter {
            return Err(Error::NewtonDiverged {
                iterations: iters,
                residual: fnorm,
                trace,
            });
        }
        // J = Δ_h − diag(g λ e^{λw}).
        let mut jac = BandedMatrix::zeros(n_int, ix);
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let k = (j - 1) * ix + (i - 1);
                jac.set(
                    k,
                    k,
                    -2.0 * (inv_hx2 + inv_hy2) - g_int[k] * lambda * (lambda * w[k]).exp(),
                );
                if i > 1 {
                    jac.set(k, k - 1, inv_hx2);
                }
                if i < nx - 2 {
                    jac.set(k, k + 1, inv_hx2);
                }
                if j > 1 {
                    jac.set(k, k - ix, inv_hy2);
                }
                if j < ny - 2 {
                    jac.set(k, k + ix, inv_hy2);
                }
            }
        }
        let neg: Vec<f64> = fw.iter().map(|r| -r).collect();
        let delta = jac.solve(&neg)?;

        // Backtracking line search with sufficient-decrease acceptance.
        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = w.iter().zip(&delta).map(|(a, d)| a + alpha * d).collect();
            let ft = residual(&trial);
            let fn_trial = norm(&ft);
            if fn_trial <= (1.0 - 1e-4 * alpha) * fnorm {
                w = trial;
                fw = ft;
                fnorm = fn_trial;
                break;
            }
            alpha *= 0.5;
            if alpha < 1.0 / 1024.0 {
                return Err(Error::NewtonDiverged {
                    iterations: iters,
                    residual: fnorm,
                    trace,
                });
            }
        }
        trace.push(fnorm);
        iters += 1;
    }

    let mut values = border.clone();
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            values[grid.idx(i, j)] = w[grid.interior_idx(i, j)];
        }
    }
    let mut max_error: f64 = 0.0;
    for j in 0..ny {
        for i in 0..nx {
            let exact = problem
                .reference
                .eval(&Point::of(&[("x", grid.xs.x(i)), ("y", grid.ys.x(j))]))?;
            max_error = max_error.max((values[grid.idx(i, j)] - exact).abs());
        }
    }

    Ok(EllipticSolution {
        grid,
        values,
        max_error,
        newton_iters: iters,
        residual_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn newton_converges_quadratically_on_the_sec_profile() {
        let entry = catalog::find("liouville_sec").unwrap();
        let problem = EllipticProblem {
            reference: &entry.field,
            lambda: 1.0,
            source: None,
            rect: [0.3, 0.8, 0.3, 0.8],
        };
        let sol = solve_liouville(&problem, 33, 33, 1e-10, 30).unwrap();
        assert!(sol.newton_iters <= 8, "{} iterations", sol.newton_iters);
        assert!(sol.max_error < 1e-3, "error {:.3e}", sol.max_error);
        // Line search enforces strict decrease.
        for pair in sol.residual_trace.windows(2) {
            assert!(pair[1] < pair[0]);
        }
    }

    #[test]
    fn second_order_convergence_in_h() {
        let entry = catalog::find("liouville_sec").unwrap();
        let problem = EllipticProblem {
            reference: &entry.field,
            lambda: 1.0,
            source: None,
            rect: [0.3, 0.8, 0.3, 0.8],
        };
        let e1 = solve_liouville(&problem, 17, 17, 1e-10, 30).unwrap().max_error;
        let e2 = solve_liouville(&problem, 33, 33, 1e-10, 30).unwrap().max_error;
        let p = (e1 / e2).log2();
        assert!((1.6..=2.4).contains(&p), "order {p:.2} ({e1:.3e} -> {e2:.3e})");
    }

    #[test]
    fn negative_lambda_profile_is_solved_too() {
        let entry = catalog::find("liouville_sech").unwrap();
        let problem = EllipticProblem {
            reference: &entry.field,
            lambda: -1.0,
            source: None,
            rect: [-1.0, 1.0, -1.0, 1.0],
        };
        let sol = solve_liouville(&problem, 25, 25, 1e-10, 30).unwrap();
        assert!(sol.max_error < 5e-3, "error {:.3e}", sol.max_error);
    }

    #[test]
    fn inhomogeneous_source_is_honored() {
        let entry = catalog::find("liouville_inhomogeneous").unwrap();
        let catalog::EquationTag::LiouvilleInhomogeneous { lambda, source } = &entry.tag else {
            panic!("tag mismatch");
        };
        let problem = EllipticProblem {
            reference: &entry.field,
            lambda: *lambda,
            source: Some(source),
            rect: [0.5, 1.2, 0.5, 1.2],
        };
        let sol = solve_liouville(&problem, 25, 25, 1e-10, 30).unwrap();
        assert!(sol.max_error < 5e-3, "error {:.3e}", sol.max_error);
    }

    #[test]
    fn rejects_zero_lambda_and_bad_tolerance() {
        let entry = catalog::find("liouville_sec").unwrap();
        let problem = EllipticProblem {
            reference: &entry.field,
            lambda: 0.0,
            source: None,
            rect: [0.3, 0.8, 0.3, 0.8],
        };
        assert!(matches!(
            solve_liouville(&problem, 9, 9, 1e-10, 30),
            Err(Error::SolverInput(_))
        ));
    }
}
