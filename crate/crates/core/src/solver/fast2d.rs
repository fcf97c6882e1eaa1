//! Reference solver for the plane equation family
//! u_t = f(x,y) · Δ ln u − λu on a rectangle.
//!
//! Weight f ≡ 1 and λ = 0 give the plain logarithmic diffusion equation;
//! a log-harmonic f gives the weighted variant; λ > 0 adds the linear
//! sink. As in the one-dimensional solver the march works in s = ln u
//! (s_t = f e^{−s} Δ_h s − λ) with Crank–Nicolson in time, one Newton
//! solve per step, and exact Dirichlet data from the reference field.

use crate::analytic::expr::{Expr, Point};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::solver::banded::BandedMatrix;
use crate::solver::fast1d::{ParabolicConfig, TimeScheme};
use crate::solver::grid::Grid2D;

#[derive(Debug, Clone)]
pub struct Fast2dProblem<'a> {
    /// Exact reference over (x, y, t): initial data, boundary data, and
    /// the error yardstick.
    pub reference: &'a Field,
    /// Positive log-harmonic weight; `None` means f ≡ 1.
    pub weight: Option<&'a Expr>,
    /// Sink coefficient λ in u_t = f Δ ln u − λu.
    pub sink: f64,
    /// x0, x1, y0, y1.
    pub rect: [f64; 4],
}

#[derive(Debug, Clone)]
pub struct Fast2dSolution {
    pub grid: Grid2D,
    /// u at t_final, full grid, x fastest.
    pub values: Vec<f64>,
    pub max_error: f64,
    pub steps: usize,
    pub max_newton_iters: usize,
}

struct Stencil {
    nx: usize,
    ny: usize,
    inv_hx2: f64,
    inv_hy2: f64,
}

impl Stencil {
    /// f e^{−s} Δ_h s − λ on the interior. `s` is interior-only; boundary
    /// log-values come from `border` (full-grid layout, interior ignored).
    fn rhs(&self, s: &[f64], border: &[f64], f: &[f64], lambda: f64) -> Vec<f64> {
        let (nx, ny) = (self.nx, self.ny);
        let ix = nx - 2;
        let mut g = vec![0.0; s.len()];
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let k = (j - 1) * ix + (i - 1);
                let c = s[k];
                let west = if i == 1 { border[j * nx + (i - 1)] } else { s[k - 1] };
                let east = if i == nx - 2 { border[j * nx + (i + 1)] } else { s[k + 1] };
                let south = if j == 1 { border[(j - 1) * nx + i] } else { s[k - ix] };
                let north = if j == ny - 2 { border[(j + 1) * nx + i] } else { s[k + ix] };
                let lap = (west - 2.0 * c + east) * self.inv_hx2
                    + (south - 2.0 * c + north) * self.inv_hy2;
                g[k] = f[k] * (-c).exp() * lap - lambda;
            }
        }
        g
    }
}

fn log_ref_at(reference: &Field, x: f64, y: f64, t: f64) -> Result<f64> {
    let v = reference.eval(&Point::of(&[("x", x), ("y", y), ("t", t)]))?;
    if v <= 0.0 {
        return Err(Error::SolverInput(format!(
            "reference is not positive at ({x}, {y}, t = {t}): {v}"
        )));
    }
    Ok(v.ln())
}

/// Boundary log-values on the full-grid layout at time t (interior slots
/// left at 0, never read).
fn boundary_logs(reference: &Field, grid: &Grid2D, t: f64) -> Result<Vec<f64>> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut b = vec![0.0; nx * ny];
    for i in 0..nx {
        b[grid.idx(i, 0)] = log_ref_at(reference, grid.xs.x(i), grid.ys.x(0), t)?;
        b[grid.idx(i, ny - 1)] = log_ref_at(reference, grid.xs.x(i), grid.ys.x(ny - 1), t)?;
    }
    for j in 1..ny - 1 {
        b[grid.idx(0, j)] = log_ref_at(reference, grid.xs.x(0), grid.ys.x(j), t)?;
        b[grid.idx(nx - 1, j)] = log_ref_at(reference, grid.xs.x(nx - 1), grid.ys.x(j), t)?;
    }
    Ok(b)
}

pub fn solve_fast2d(
    problem: &Fast2dProblem,
    nx: usize,
    ny: usize,
    cfg: &ParabolicConfig,
) -> Result<Fast2dSolution> {
    if cfg.scheme != TimeScheme::CrankNicolson {
        return Err(Error::SolverInput(
            "the plane march only implements the Crank-Nicolson scheme".into(),
        ));
    }
    let sig = problem.reference.signature().to_vec();
    if sig != ["x", "y", "t"] {
        return Err(Error::SolverInput(format!(
            "reference must be a field over (x, y, t), got {sig:?}"
        )));
    }
    if problem.sink < 0.0 || !problem.sink.is_finite() {
        return Err(Error::SolverInput(format!(
            "sink coefficient must be finite and nonnegative, got {}",
            problem.sink
        )));
    }
    let grid = Grid2D::new(problem.rect, nx, ny)?;
    let stencil = Stencil {
        nx,
        ny,
        inv_hx2: 1.0 / (grid.xs.h() * grid.xs.h()),
        inv_hy2: 1.0 / (grid.ys.h() * grid.ys.h()),
    };
    let n_int = grid.n_interior();
    let ix = nx - 2;

    // Interior weight values, validated positive.
    let mut f_int = vec![1.0; n_int];
    if let Some(w) = problem.weight {
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let v = w.eval(&Point::of(&[("x", grid.xs.x(i)), ("y", grid.ys.x(j))]))?;
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::SolverInput(format!(
                        "weight must be positive on the grid, got {v}"
                    )));
                }
                f_int[grid.interior_idx(i, j)] = v;
            }
        }
    }

    let mut s_int: Vec<f64> = Vec::with_capacity(n_int);
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            s_int.push(log_ref_at(problem.reference, grid.xs.x(i), grid.ys.x(j), cfg.t0)?);
        }
    }
    let mut border = boundary_logs(problem.reference, &grid, cfg.t0)?;

    let mut t = cfg.t0;
    let mut steps = 0usize;
    let mut max_newton = 0usize;
    while t < cfg.t_final - 1e-12 {
        let k = cfg.dt.min(cfg.t_final - t);
        let border_new = boundary_logs(problem.reference, &grid, t + k)?;
        let g_old = stencil.rhs(&s_int, &border, &f_int, problem.sink);
        let mut w = s_int.clone();
        let mut iters = 0usize;
        let mut trace = Vec::new();
        loop {
            let g_new = stencil.rhs(&w, &border_new, &f_int, problem.sink);
            let resid: Vec<f64> = (0..n_int)
                .map(|i| w[i] - s_int[i] - 0.5 * k * (g_new[i] + g_old[i]))
                .collect();
            let norm = resid.iter().fold(0.0f64, |m, r| m.max(r.abs()));
            trace.push(norm);
            if norm < cfg.newton_tol {
                break;
            }
            if iters >= cfg.max_newton {
                return Err(Error::NewtonDiverged {
                    iterations: iters,
                    residual: norm,
                    trace,
                });
            }
            // J = I − (k/2)(f e^{−w} Δ_h − diag(f e^{−w} Δ_h w)), where the
            // diagonal correction equals G(w) + λ.
            let mut jac = BandedMatrix::zeros(n_int, ix);
            for j in 1..ny - 1 {
                for i in 1..nx - 1 {
                    let kk = (j - 1) * ix + (i - 1);
                    let e = f_int[kk] * (-w[kk]).exp();
                    jac.set(
                        kk,
                        kk,
                        1.0 + k * e * (stencil.inv_hx2 + stencil.inv_hy2)
                            + 0.5 * k * (g_new[kk] + problem.sink),
                    );
                    if i > 1 {
                        jac.set(kk, kk - 1, -0.5 * k * e * stencil.inv_hx2);
                    }
                    if i < nx - 2 {
                        jac.set(kk, kk + 1, -0.5 * k * e * stencil.inv_hx2);
                    }
                    if j > 1 {
                        jac.set(kk, kk - ix, -0.5 * k * e * stencil.inv_hy2);
                    }
                    if j < ny - 2 {
                        jac.set(kk, kk + ix, -0.5 * k * e * stencil.inv_hy2);
                    }
                }
            }
            let neg: Vec<f64> = resid.iter().map(|r| -r).collect();
            let delta = jac.solve(&neg)?;
            for i in 0..n_int {
                w[i] += delta[i];
            }
            iters += 1;
        }
        max_newton = max_newton.max(iters);
        s_int = w;
        border = border_new;
        t += k;
        steps += 1;
    }

    // Assemble u = e^s on the full grid and measure the error.
    let mut values = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let interior = i >= 1 && i < nx - 1 && j >= 1 && j < ny - 1;
            values[grid.idx(i, j)] = if interior {
                s_int[grid.interior_idx(i, j)].exp()
            } else {
                border[grid.idx(i, j)].exp()
            };
        }
    }
    let mut max_error: f64 = 0.0;
    for j in 0..ny {
        for i in 0..nx {
            let exact = problem.reference.eval(&Point::of(&[
                ("x", grid.xs.x(i)),
                ("y", grid.ys.x(j)),
                ("t", cfg.t_final),
            ]))?;
            max_error = max_error.max((values[grid.idx(i, j)] - exact).abs());
        }
    }

    Ok(Fast2dSolution {
        grid,
        values,
        max_error,
        steps,
        max_newton_iters: max_newton,
    })
}
