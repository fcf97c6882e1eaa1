//! Config files for `solve`: a JSON description of a refinement study.
//! The run writes the finest-grid solution as CSV plus the convergence
//! report as JSON into the output directory, and prints the report.

use std::path::Path;

use serde::Deserialize;

use fastdiff_core::analytic::sexpr;
use fastdiff_core::solver::{
    solve_fast1d, solve_fast2d, solve_liouville, study_elliptic, study_fast1d, study_fast2d,
    write_csv_1d, write_csv_2d, ConvergenceReport, EllipticProblem, Fast2dProblem,
    Grid1D, ParabolicConfig, TimeScheme,
};
use fastdiff_core::{Error, Expr, Result};

use crate::recipe::{resolve_seed, SeedSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    /// One of `fast1d`, `fast2d`, `weighted`, `sink`, `liouville`.
    pub equation: String,
    /// Exact reference solution: catalog id or inline expression.
    pub reference: SeedSpec,
    /// `fast1d` only: the spatial interval.
    #[serde(default)]
    pub range: Option<(f64, f64)>,
    /// Plane equations: x0, x1, y0, y1.
    #[serde(default)]
    pub rect: Option<[f64; 4]>,
    /// Node counts per axis, strictly increasing.
    pub grids: Vec<usize>,
    #[serde(default)]
    pub t0: Option<f64>,
    #[serde(default)]
    pub t_final: Option<f64>,
    /// Time step is dt_coeff * h on each grid.
    #[serde(default)]
    pub dt_coeff: Option<f64>,
    /// `fast1d` only: `crank_nicolson` (default) or `lagged_euler`.
    #[serde(default)]
    pub scheme: Option<String>,
    /// `weighted` only: the weight f as an s-expression over (x, y).
    #[serde(default)]
    pub weight: Option<String>,
    /// `liouville` only: optional source factor as an s-expression.
    #[serde(default)]
    pub source: Option<String>,
    /// `sink` only: the sink coefficient.
    #[serde(default)]
    pub sink: Option<f64>,
    /// `liouville` only: the exponent coefficient.
    #[serde(default)]
    pub lambda: Option<f64>,
    /// `liouville` only: Newton residual tolerance (default 1e-10).
    #[serde(default)]
    pub tol: Option<f64>,
    /// `liouville` only: Newton iteration cap (default 25).
    #[serde(default)]
    pub max_iter: Option<usize>,
}

fn need<T: Copy>(value: Option<T>, what: &str, equation: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("`{equation}` config needs `{what}`")))
}

fn parse_scheme(name: Option<&str>) -> Result<TimeScheme> {
    match name {
        None | Some("crank_nicolson") => Ok(TimeScheme::CrankNicolson),
        Some("lagged_euler") => Ok(TimeScheme::LaggedEuler),
        Some(other) => Err(Error::Config(format!("unknown scheme `{other}`"))),
    }
}

fn parse_expr(text: Option<&String>) -> Result<Option<Expr>> {
    text.map(|s| sexpr::parse(s)).transpose()
}

/// Runs the study a config describes, writing `solution.csv` and
/// `convergence.json` under `out_dir`. Returns the report. Output files
/// appear only after the whole run succeeds.
pub fn run(config: &SolveConfig, out_dir: &Path) -> Result<ConvergenceReport> {
    let (reference, _) = resolve_seed(&config.reference)?;
    let eq = config.equation.as_str();
    let finest = *config
        .grids
        .last()
        .ok_or_else(|| Error::Config("config needs a non-empty `grids` ladder".into()))?;

    let mut csv: Vec<u8> = Vec::new();

    let report = match eq {
        "fast1d" => {
            let range = need(config.range, "range", eq)?;
            let t0 = need(config.t0, "t0", eq)?;
            let t1 = need(config.t_final, "t_final", eq)?;
            let dt_coeff = need(config.dt_coeff, "dt_coeff", eq)?;
            let scheme = parse_scheme(config.scheme.as_deref())?;
            let report = study_fast1d(
                &reference,
                range,
                &config.grids,
                t0,
                t1,
                dt_coeff,
                scheme,
            )?;
            let grid = Grid1D::new(range.0, range.1, finest)?;
            let cfg =
                ParabolicConfig::new(t0, t1, dt_coeff * grid.h())?.with_scheme(scheme);
            let sol = solve_fast1d(&reference, grid, &cfg)?;
            write_csv_1d(&mut csv, &sol.grid, &sol.values)?;
            report
        }
        "fast2d" | "weighted" | "sink" => {
            let rect = need(config.rect, "rect", eq)?;
            let t0 = need(config.t0, "t0", eq)?;
            let t1 = need(config.t_final, "t_final", eq)?;
            let dt_coeff = need(config.dt_coeff, "dt_coeff", eq)?;
            let weight = match eq {
                "weighted" => Some(
                    parse_expr(config.weight.as_ref())?
                        .ok_or_else(|| Error::Config("`weighted` config needs `weight`".into()))?,
                ),
                _ => None,
            };
            let sink = match eq {
                "sink" => need(config.sink, "sink", eq)?,
                _ => 0.0,
            };
            let problem = Fast2dProblem {
                reference: &reference,
                weight: weight.as_ref(),
                sink,
                rect,
            };
            let report = study_fast2d(&problem, &config.grids, t0, t1, dt_coeff)?;
            let h = (rect[1] - rect[0]) / (finest - 1) as f64;
            let cfg = ParabolicConfig::new(t0, t1, dt_coeff * h)?;
            let sol = solve_fast2d(&problem, finest, finest, &cfg)?;
            write_csv_2d(&mut csv, &sol.grid, &sol.values)?;
            report
        }
        "liouville" => {
            let rect = need(config.rect, "rect", eq)?;
            let lambda = need(config.lambda, "lambda", eq)?;
            let source = parse_expr(config.source.as_ref())?;
            let tol = config.tol.unwrap_or(1e-10);
            let max_iter = config.max_iter.unwrap_or(25);
            let problem = EllipticProblem {
                reference: &reference,
                lambda,
                source: source.as_ref(),
                rect,
            };
            let report = study_elliptic(&problem, &config.grids, tol, max_iter)?;
            let sol = solve_liouville(&problem, finest, finest, tol, max_iter)?;
            write_csv_2d(&mut csv, &sol.grid, &sol.values)?;
            report
        }
        other => {
            return Err(Error::Config(format!(
                "unknown equation `{other}` (expected fast1d, fast2d, weighted, sink, or liouville)"
            )))
        }
    };

    let json = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("solution.csv"), csv)?;
    std::fs::write(out_dir.join("convergence.json"), json)?;
    Ok(report)
}
