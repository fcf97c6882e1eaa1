//! Reference solver for the reduced equation v_t = (ln v)_ηη.
//!
//! The march works in s = ln v, which keeps the discrete solution positive
//! by construction and turns the equation into s_t = e^{−s} s_ηη. Dirichlet
//! boundary data and the initial profile come from an exact reference
//! field, so the measured error is pure discretization error.

use crate::analytic::expr::Point;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::solver::banded::solve_tridiagonal;
use crate::solver::grid::Grid1D;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeScheme {
    /// Second-order Crank–Nicolson with a Newton solve per step.
    CrankNicolson,
    /// First-order implicit Euler with the diffusion coefficient lagged to
    /// the previous time level. Kept as a negative control: convergence
    /// studies must see its lower order.
    LaggedEuler,
}

#[derive(Debug, Clone)]
pub struct ParabolicConfig {
    pub t0: f64,
    pub t_final: f64,
    pub dt: f64,
    pub scheme: TimeScheme,
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl ParabolicConfig {
    pub fn new(t0: f64, t_final: f64, dt: f64) -> Result<ParabolicConfig> {
        if !(t0.is_finite() && t_final.is_finite() && t0 < t_final) {
            return Err(Error::SolverInput(format!(
                "bad time interval [{t0}, {t_final}]"
            )));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::SolverInput(format!("bad time step {dt}")));
        }
        Ok(ParabolicConfig {
            t0,
            t_final,
            dt,
            scheme: TimeScheme::CrankNicolson,
            newton_tol: 1e-12,
            max_newton: 25,
        })
    }

    pub fn with_scheme(mut self, scheme: TimeScheme) -> ParabolicConfig {
        self.scheme = scheme;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Fast1dSolution {
    pub grid: Grid1D,
    /// v at t_final on every node.
    pub values: Vec<f64>,
    /// max |v_numeric − v_reference| at t_final over all nodes.
    pub max_error: f64,
    pub steps: usize,
    pub max_newton_iters: usize,
}

/// Evaluates ln(reference) at one node, rejecting non-positive values:
/// the log march needs a positive reference everywhere it reads data.
fn log_ref(reference: &Field, var: &str, x: f64, t: f64) -> Result<f64> {
    let v = reference.eval(&Point::of(&[(var, x), ("t", t)]))?;
    if v <= 0.0 {
        return Err(Error::SolverInput(format!(
            "reference is not positive at ({var} = {x}, t = {t}): {v}"
        )));
    }
    Ok(v.ln())
}

/// e^{−s}·D₂s on the interior, with given boundary log-values.
fn rhs_interior(s: &[f64], left: f64, right: f64, h: f64) -> Vec<f64> {
    let n = s.len();
    let mut g = vec![0.0; n];
    let h2 = h * h;
    for i in 0..n {
        let sm = if i == 0 { left } else { s[i - 1] };
        let sp = if i == n - 1 { right } else { s[i + 1] };
        g[i] = (-s[i]).exp() * (sm - 2.0 * s[i] + sp) / h2;
    }
    g
}

pub fn solve_fast1d(
    reference: &Field,
    grid: Grid1D,
    cfg: &ParabolicConfig,
) -> Result<Fast1dSolution> {
    let sig = reference.signature().to_vec();
    if sig.len() != 2 || !sig.iter().any(|v| v == "t") {
        return Err(Error::SolverInput(format!(
            "reference must be a field over (space, t), got {sig:?}"
        )));
    }
    let var = sig.iter().find(|v| *v != "t").unwrap().clone();
    let h = grid.h();
    let n_int = grid.n - 2;
    let mut s_int: Vec<f64> = (1..=n_int)
        .map(|i| log_ref(reference, &var, grid.x(i), cfg.t0))
        .collect::<Result<_>>()?;
    let mut bc = (
        log_ref(reference, &var, grid.lo, cfg.t0)?,
        log_ref(reference, &var, grid.hi, cfg.t0)?,
    );

    let mut t = cfg.t0;
    let mut steps = 0usize;
    let mut max_newton = 0usize;
    while t < cfg.t_final - 1e-12 {
        let k = cfg.dt.min(cfg.t_final - t);
        let bc_new = (
            log_ref(reference, &var, grid.lo, t + k)?,
            log_ref(reference, &var, grid.hi, t + k)?,
        );
        match cfg.scheme {
            TimeScheme::CrankNicolson => {
                let g_old = rhs_interior(&s_int, bc.0, bc.1, h);
                let mut w = s_int.clone();
                let mut iters = 0usize;
                let mut trace = Vec::new();
                loop {
                    let g_new = rhs_interior(&w, bc_new.0, bc_new.1, h);
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
                    // J = I − (k/2)(e^{−w} D₂ − diag(G(w))).
                    let h2 = h * h;
                    let mut lower = vec![0.0; n_int];
                    let mut diag = vec![0.0; n_int];
                    let mut upper = vec![0.0; n_int];
                    for i in 0..n_int {
                        let e = (-w[i]).exp();
                        diag[i] = 1.0 + k * e / h2 + 0.5 * k * g_new[i];
                        if i > 0 {
                            lower[i] = -0.5 * k * e / h2;
                        }
                        if i < n_int - 1 {
                            upper[i] = -0.5 * k * e / h2;
                        }
                    }
                    let neg: Vec<f64> = resid.iter().map(|r| -r).collect();
                    let delta = solve_tridiagonal(&lower, &diag, &upper, &neg)?;
                    for i in 0..n_int {
                        w[i] += delta[i];
                    }
                    iters += 1;
                }
                max_newton = max_newton.max(iters);
                s_int = w;
            }
            TimeScheme::LaggedEuler => {
                // (I − k e^{−s_old} D₂) s_new = s_old + boundary terms.
                let h2 = h * h;
                let mut lower = vec![0.0; n_int];
                let mut diag = vec![0.0; n_int];
                let mut upper = vec![0.0; n_int];
                let mut rhs = s_int.clone();
                for i in 0..n_int {
                    let e = (-s_int[i]).exp();
                    let r = k * e / h2;
                    diag[i] = 1.0 + 2.0 * r;
                    if i > 0 {
                        lower[i] = -r;
                    } else {
                        rhs[i] += r * bc_new.0;
                    }
                    if i < n_int - 1 {
                        upper[i] = -r;
                    } else {
                        rhs[i] += r * bc_new.1;
                    }
                }
                s_int = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
            }
        }
        bc = bc_new;
        t += k;
        steps += 1;
    }

    let mut values = Vec::with_capacity(grid.n);
    values.push(bc.0.exp());
    values.extend(s_int.iter().map(|s| s.exp()));
    values.push(bc.1.exp());

    let mut max_error: f64 = 0.0;
    for i in 0..grid.n {
        let exact = reference.eval(&Point::of(&[(var.as_str(), grid.x(i)), ("t", cfg.t_final)]))?;
        max_error = max_error.max((values[i] - exact).abs());
    }

    Ok(Fast1dSolution {
        grid,
        values,
        max_error,
        steps,
        max_newton_iters: max_newton,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn reference() -> Field {
        catalog::one_dim_family(catalog::Family::TrigSh, 1.0, 0.0, 1.0)
            .unwrap()
            .field
    }

    #[test]
    fn zero_span_march_reproduces_initial_data() {
        // One tiny step: the result must stay within O(dt^2) of the exact
        // profile it was seeded with.
        let r = reference();
        let grid = Grid1D::new(-1.0, 1.0, 33).unwrap();
        let cfg = ParabolicConfig::new(0.5, 0.5 + 1e-6, 1e-6).unwrap();
        let sol = solve_fast1d(&r, grid, &cfg).unwrap();
        assert_eq!(sol.steps, 1);
        // One step of size dt leaks dt * O(h^2) spatial truncation.
        assert!(sol.max_error < 1e-9, "error {:.3e}", sol.max_error);
    }

    #[test]
    fn crank_nicolson_converges_at_second_order() {
        let r = reference();
        let mut errs = Vec::new();
        for n in [33usize, 65, 129] {
            let grid = Grid1D::new(-1.0, 1.0, n).unwrap();
            let h = grid.h();
            let cfg = ParabolicConfig::new(0.5, 1.0, 0.5 * h).unwrap();
            errs.push(solve_fast1d(&r, grid, &cfg).unwrap().max_error);
        }
        let p1 = (errs[0] / errs[1]).log2();
        let p2 = (errs[1] / errs[2]).log2();
        assert!(
            (1.7..=2.3).contains(&p1) && (1.7..=2.3).contains(&p2),
            "orders {p1:.2}, {p2:.2} from errors {errs:?}"
        );
    }

    #[test]
    fn lagged_control_is_first_order_only() {
        let r = reference();
        let mut errs = Vec::new();
        for n in [33usize, 65, 129] {
            let grid = Grid1D::new(-1.0, 1.0, n).unwrap();
            let h = grid.h();
            let cfg = ParabolicConfig::new(0.5, 1.0, 0.5 * h)
                .unwrap()
                .with_scheme(TimeScheme::LaggedEuler);
            errs.push(solve_fast1d(&r, grid, &cfg).unwrap().max_error);
        }
        let p = (errs[1] / errs[2]).log2();
        assert!((0.7..=1.3).contains(&p), "order {p:.2} from errors {errs:?}");
    }

    #[test]
    fn numeric_solution_stays_positive() {
        let r = reference();
        let grid = Grid1D::new(-1.0, 1.0, 65).unwrap();
        let cfg = ParabolicConfig::new(0.5, 1.0, 0.01).unwrap();
        let sol = solve_fast1d(&r, grid, &cfg).unwrap();
        assert!(sol.values.iter().all(|v| *v > 0.0));
        assert!(sol.max_newton_iters <= 6, "{}", sol.max_newton_iters);
    }

    #[test]
    fn rejects_bad_configs_and_references() {
        assert!(ParabolicConfig::new(1.0, 0.5, 0.1).is_err());
        assert!(ParabolicConfig::new(0.5, 1.0, 0.0).is_err());
        let plane = catalog::base_seed().field;
        let grid = Grid1D::new(-1.0, 1.0, 17).unwrap();
        let cfg = ParabolicConfig::new(0.5, 1.0, 0.1).unwrap();
        assert!(matches!(
            solve_fast1d(&plane, grid, &cfg),
            Err(Error::SolverInput(_))
        ));
    }
}
