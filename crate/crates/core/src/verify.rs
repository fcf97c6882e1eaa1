//! Independent residual oracles.
//!
//! Every oracle takes a candidate field and a deterministic sample plan,
//! evaluates the governing equation's residual pointwise from exact
//! symbolic derivatives of the candidate (never reusing the algebra that
//! constructed it), and reports worst-case absolute and relative residuals.
//! A second, finite-difference route is provided for cross-checking the
//! symbolic differentiation itself.
//!
//! Relative residuals are normalized by 1 + the sum of the magnitudes of
//! the equation's terms at the sample, so cancellation-heavy points are
//! judged against their own scale.

use serde::{Deserialize, Serialize};

use crate::analytic::expr::{Expr, Point};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::sample::SampleSpec;

/// Samples where a solution that must be positive sits at or below this
/// floor are skipped (and counted): log-diffusion residuals need ln u.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

/// Worst-case residual summary over one deterministic sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Which residual operator produced this report.
    pub equation: String,
    pub max_abs: f64,
    pub max_rel: f64,
    pub n_evaluated: usize,
    pub n_skipped_singular: usize,
    /// Coordinates of the sample attaining `max_rel`, in signature order.
    pub argmax: Vec<(String, f64)>,
}

/// A residual written as a signed sum of terms: r = Σ cᵢ·termᵢ(p).
/// The relative scale at a sample is 1 + Σ |cᵢ·termᵢ(p)|.
struct OraclePlan<'a> {
    equation: &'static str,
    terms: Vec<(f64, Expr)>,
    /// Term that must exceed [`POSITIVITY_FLOOR`] for the sample to count.
    positivity: Option<&'a Expr>,
    field: &'a Field,
}

impl OraclePlan<'_> {
    fn run(&self, spec: &SampleSpec) -> Result<ResidualReport> {
        let mut max_abs: f64 = 0.0;
        let mut max_rel: f64 = 0.0;
        let mut argmax: Option<Point> = None;
        let mut n_eval = 0usize;
        let mut n_skip = 0usize;

        'samples: for p in spec.points() {
            if self.field.is_singular(&p, spec.margin) {
                n_skip += 1;
                continue;
            }
            if let Some(gate) = self.positivity {
                match gate.eval(&p) {
                    Ok(v) if v > POSITIVITY_FLOOR => {}
                    Ok(_) => {
                        n_skip += 1;
                        continue;
                    }
                    Err(e) => {
                        if is_skippable(&e) {
                            n_skip += 1;
                            continue;
                        }
                        return Err(e);
                    }
                }
            }
            let mut r = 0.0;
            let mut scale = 1.0;
            for (c, term) in &self.terms {
                match term.eval(&p) {
                    Ok(v) => {
                        r += c * v;
                        scale += (c * v).abs();
                    }
                    Err(e) => {
                        if is_skippable(&e) {
                            n_skip += 1;
                            continue 'samples;
                        }
                        return Err(e);
                    }
                }
            }
            n_eval += 1;
            let abs = r.abs();
            let rel = abs / scale;
            max_abs = max_abs.max(abs);
            if rel >= max_rel {
                max_rel = rel;
                argmax = Some(p);
            }
        }

        finish_report(self.equation, max_abs, max_rel, argmax, n_eval, n_skip, spec)
    }
}

/// Evaluation failures that mean "this sample is unusable", as opposed to
/// structural errors that must propagate.
fn is_skippable(e: &Error) -> bool {
    matches!(e, Error::Singular { .. } | Error::SkippedSample(_))
}

fn finish_report(
    equation: &str,
    max_abs: f64,
    max_rel: f64,
    argmax: Option<Point>,
    n_eval: usize,
    n_skip: usize,
    spec: &SampleSpec,
) -> Result<ResidualReport> {
    let Some(arg) = argmax else {
        return Err(Error::EmptyReport {
            requested: spec.count,
            skipped: n_skip,
        });
    };
    Ok(ResidualReport {
        equation: equation.to_string(),
        max_abs,
        max_rel,
        n_evaluated: n_eval,
        n_skipped_singular: n_skip,
        argmax: arg.iter().map(|(n, v)| (n.to_string(), v)).collect(),
    })
}

/// Σ_s ∂s(u_s / u): the Laplacian of ln u kept in rational form so it is
/// defined wherever u ≠ 0.
fn log_laplacian(field: &Field, vars: &[String]) -> Result<Expr> {
    let mut sum = Vec::new();
    for s in vars {
        let ratio = Expr::div(field.partial(s)?, field.value().clone());
        sum.push(ratio.differentiate(s));
    }
    Ok(Expr::add(sum))
}

fn laplacian(field: &Field, vars: &[String]) -> Result<Expr> {
    let mut sum = Vec::new();
    for s in vars {
        sum.push(field.partial2(s)?);
    }
    Ok(Expr::add(sum))
}

/// Splits a time-dependent field's signature into (spatial vars, "t").
fn split_time(field: &Field) -> Result<Vec<String>> {
    let sig = field.signature();
    if !sig.iter().any(|v| v == "t") {
        return Err(Error::Usage(format!(
            "expected a time variable `t` in the signature, got {sig:?}"
        )));
    }
    Ok(sig.iter().filter(|v| *v != "t").cloned().collect())
}

/// Residual of u_t = Δ ln u for a field over two space variables and t.
pub fn fast_diffusion_residual(field: &Field, spec: &SampleSpec) -> Result<ResidualReport> {
    let spatial = split_time(field)?;
    if spatial.len() != 2 {
        return Err(Error::Usage(format!(
            "plane oracle needs two spatial variables, got {spatial:?}"
        )));
    }
    OraclePlan {
        equation: "fast2d",
        terms: vec![
            (1.0, field.partial("t")?),
            (-1.0, log_laplacian(field, &spatial)?),
        ],
        positivity: Some(field.value()),
        field,
    }
    .run(spec)
}

/// Residual of v_t = (ln v)_ηη for a field over (η, t).
pub fn reduced_residual(field: &Field, spec: &SampleSpec) -> Result<ResidualReport> {
    let spatial = split_time(field)?;
    if spatial.len() != 1 {
        return Err(Error::Usage(format!(
            "reduced oracle needs one spatial variable, got {spatial:?}"
        )));
    }
    OraclePlan {
        equation: "fast1d",
        terms: vec![
            (1.0, field.partial("t")?),
            (-1.0, log_laplacian(field, &spatial)?),
        ],
        positivity: Some(field.value()),
        field,
    }
    .run(spec)
}

/// Residual of u_t = f · Δ ln u for a positive weight with Δ ln f = 0.
/// The weight's log-harmonicity is validated on the sweep's own samples
/// before any residual is reported.
pub fn weighted_residual(field: &Field, weight: &Expr, spec: &SampleSpec) -> Result<ResidualReport> {
    let spatial = split_time(field)?;
    if spatial.len() != 2 {
        return Err(Error::Usage(format!(
            "weighted oracle needs two spatial variables, got {spatial:?}"
        )));
    }
    validate_log_harmonic_weight(weight, &spatial, spec)?;
    OraclePlan {
        equation: "weighted",
        terms: vec![
            (1.0, field.partial("t")?),
            (
                -1.0,
                weight.clone() * log_laplacian(field, &spatial)?,
            ),
        ],
        positivity: Some(field.value()),
        field,
    }
    .run(spec)
}

fn validate_log_harmonic_weight(weight: &Expr, spatial: &[String], spec: &SampleSpec) -> Result<()> {
    let mut terms = Vec::new();
    for s in spatial {
        let ratio = Expr::div(weight.differentiate(s), weight.clone());
        terms.push(ratio.differentiate(s));
    }
    let mut checked = 0usize;
    for p in spec.points().take(64) {
        let mut r = 0.0;
        let mut scale = 1.0;
        let mut ok = true;
        for t in &terms {
            match t.eval(&p) {
                Ok(v) => {
                    r += v;
                    scale += v.abs();
                }
                Err(e) if is_skippable(&e) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if !ok {
            continue;
        }
        checked += 1;
        if r.abs() / scale > 1e-8 {
            return Err(Error::Precondition(format!(
                "weight is not log-harmonic: |laplacian ln f| = {:.3e} at {p}",
                r.abs()
            )));
        }
        if checked >= 24 {
            break;
        }
    }
    if checked == 0 {
        return Err(Error::Precondition(
            "weight could not be evaluated on any sweep sample".into(),
        ));
    }
    Ok(())
}

/// Residual of u_t = Δ ln u − λu.
pub fn sink_residual(field: &Field, lambda: f64, spec: &SampleSpec) -> Result<ResidualReport> {
    let spatial = split_time(field)?;
    if spatial.len() != 2 {
        return Err(Error::Usage(format!(
            "sink oracle needs two spatial variables, got {spatial:?}"
        )));
    }
    OraclePlan {
        equation: "sink",
        terms: vec![
            (1.0, field.partial("t")?),
            (-1.0, log_laplacian(field, &spatial)?),
            (lambda, field.value().clone()),
        ],
        positivity: Some(field.value()),
        field,
    }
    .run(spec)
}

/// Residual of Δw = exp(λw), or Δw = g·exp(λw) when a source is given.
/// The candidate is a steady field over two plane variables.
pub fn liouville_residual(
    field: &Field,
    lambda: f64,
    source: Option<&Expr>,
    spec: &SampleSpec,
) -> Result<ResidualReport> {
    let sig = field.signature().to_vec();
    if sig.len() != 2 {
        return Err(Error::Usage(format!(
            "elliptic oracle needs exactly two variables, got {sig:?}"
        )));
    }
    let expw = (Expr::constant(lambda) * field.value().clone()).exp();
    let rhs = match source {
        Some(g) => g.clone() * expw,
        None => expw,
    };
    OraclePlan {
        equation: if source.is_some() {
            "liouville_inhomogeneous"
        } else {
            "liouville"
        },
        terms: vec![(1.0, laplacian(field, &sig)?), (-1.0, rhs)],
        positivity: None,
        field,
    }
    .run(spec)
}

/// Residual of the quadratic form w_t = w·w_ηη − (w_η)² satisfied by
/// w = 1/v whenever v solves the reduced equation.
pub fn quadratic_form_residual(field: &Field, spec: &SampleSpec) -> Result<ResidualReport> {
    let spatial = split_time(field)?;
    if spatial.len() != 1 {
        return Err(Error::Usage(format!(
            "quadratic-form oracle needs one spatial variable, got {spatial:?}"
        )));
    }
    let eta = &spatial[0];
    let w = Expr::div(Expr::constant(1.0), field.value().clone());
    let w_t = w.differentiate("t");
    let w_e = w.differentiate(eta);
    let w_ee = w_e.differentiate(eta);
    OraclePlan {
        equation: "quadratic_form",
        terms: vec![
            (1.0, w_t),
            (-1.0, w.clone() * w_ee),
            (1.0, w_e.clone().powi(2)),
        ],
        positivity: Some(field.value()),
        field,
    }
    .run(spec)
}

/// Value and second-order jet of a scalar plane field at a point.
#[derive(Debug, Clone, Copy)]
pub struct Jet2 {
    pub v: f64,
    pub vx: f64,
    pub vy: f64,
    pub vxx: f64,
    pub vyy: f64,
}

/// A steady scalar field over the plane that can report its second-order
/// jet. Closed-form fields implement it symbolically; numerically backed
/// fields (dense ODE output along a potential's level structure) implement
/// it from their own derivative data.
pub trait PlaneField {
    fn jet(&self, x: f64, y: f64) -> Result<Jet2>;
    fn is_singular(&self, x: f64, y: f64, margin: f64) -> bool;
}

impl PlaneField for Field {
    fn jet(&self, x: f64, y: f64) -> Result<Jet2> {
        let sig = self.signature().to_vec();
        if sig.len() != 2 {
            return Err(Error::Usage(format!(
                "jet evaluation needs a two-variable field, got {sig:?}"
            )));
        }
        let p = Point::of(&[(&sig[0], x), (&sig[1], y)]);
        Ok(Jet2 {
            v: self.eval(&p)?,
            vx: self.partial(&sig[0])?.eval(&p)?,
            vy: self.partial(&sig[1])?.eval(&p)?,
            vxx: self.partial2(&sig[0])?.eval(&p)?,
            vyy: self.partial2(&sig[1])?.eval(&p)?,
        })
    }

    fn is_singular(&self, x: f64, y: f64, margin: f64) -> bool {
        let sig = self.signature();
        if sig.len() != 2 {
            return true;
        }
        let p = Point::of(&[(&sig[0], x), (&sig[1], y)]);
        Field::is_singular(self, &p, margin)
    }
}

/// Residuals of the coupled elliptic system
///
/// ```text
/// Δu = exp(u) + A|∇Φ|²,   Δv = exp(v) − B|∇Φ|²,   ΔΦ = exp(v) − exp(u)
/// ```
///
/// One report per component, sharing a single sweep: a sample is skipped
/// for every component if any of the three fields cannot produce a jet.
pub fn system22_residual(
    u: &dyn PlaneField,
    v: &dyn PlaneField,
    phi: &dyn PlaneField,
    a: f64,
    b: f64,
    spec: &SampleSpec,
) -> Result<Vec<ResidualReport>> {
    let names = spec.domain.names();
    if names.len() != 2 {
        return Err(Error::Usage(format!(
            "system oracle needs a two-variable domain, got {names:?}"
        )));
    }
    struct Acc {
        max_abs: f64,
        max_rel: f64,
        argmax: Option<Point>,
    }
    let mut accs = [
        Acc { max_abs: 0.0, max_rel: 0.0, argmax: None },
        Acc { max_abs: 0.0, max_rel: 0.0, argmax: None },
        Acc { max_abs: 0.0, max_rel: 0.0, argmax: None },
    ];
    let mut n_eval = 0usize;
    let mut n_skip = 0usize;

    for p in spec.points() {
        let x = p.get(&names[0]).expect("domain variable");
        let y = p.get(&names[1]).expect("domain variable");
        if u.is_singular(x, y, spec.margin)
            || v.is_singular(x, y, spec.margin)
            || phi.is_singular(x, y, spec.margin)
        {
            n_skip += 1;
            continue;
        }
        let jets = (u.jet(x, y), v.jet(x, y), phi.jet(x, y));
        let (ju, jv, jp) = match jets {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            (Err(e), ..) | (_, Err(e), _) | (.., Err(e)) => {
                if is_skippable(&e) {
                    n_skip += 1;
                    continue;
                }
                return Err(e);
            }
        };
        let grad_phi_sq = jp.vx * jp.vx + jp.vy * jp.vy;
        let (eu, ev) = (ju.v.exp(), jv.v.exp());
        // (residual, scale) per component.
        let rows = [
            (
                ju.vxx + ju.vyy - eu - a * grad_phi_sq,
                1.0 + (ju.vxx + ju.vyy).abs() + eu + (a * grad_phi_sq).abs(),
            ),
            (
                jv.vxx + jv.vyy - ev + b * grad_phi_sq,
                1.0 + (jv.vxx + jv.vyy).abs() + ev + (b * grad_phi_sq).abs(),
            ),
            (
                jp.vxx + jp.vyy - ev + eu,
                1.0 + (jp.vxx + jp.vyy).abs() + ev + eu,
            ),
        ];
        n_eval += 1;
        for (acc, (r, scale)) in accs.iter_mut().zip(rows) {
            let abs = r.abs();
            let rel = abs / scale;
            acc.max_abs = acc.max_abs.max(abs);
            if rel >= acc.max_rel {
                acc.max_rel = rel;
                acc.argmax = Some(p.clone());
            }
        }
    }

    let labels = ["system22_u", "system22_v", "system22_phi"];
    accs.into_iter()
        .zip(labels)
        .map(|(acc, label)| {
            finish_report(label, acc.max_abs, acc.max_rel, acc.argmax, n_eval, n_skip, spec)
        })
        .collect()
}

/// Richardson-extrapolated central first derivative: with D(h) the central
/// difference, returns (4·D(h/2) − D(h)) / 3, an O(h⁴) estimate.
pub fn fd_derivative_oracle(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    x0: f64,
    h: f64,
) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Parameter(format!("step must be positive, got {h}")));
    }
    let central = |f: &mut dyn FnMut(f64) -> Result<f64>, h: f64| -> Result<f64> {
        Ok((f(x0 + h)? - f(x0 - h)?) / (2.0 * h))
    };
    let d1 = central(f, h)?;
    let d2 = central(f, h / 2.0)?;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Richardson-extrapolated central second derivative.
pub fn fd_second_derivative(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    x0: f64,
    h: f64,
) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Parameter(format!("step must be positive, got {h}")));
    }
    let central = |f: &mut dyn FnMut(f64) -> Result<f64>, h: f64| -> Result<f64> {
        Ok((f(x0 + h)? - 2.0 * f(x0)? + f(x0 - h)?) / (h * h))
    };
    let d1 = central(f, h)?;
    let d2 = central(f, h / 2.0)?;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Finite-difference partial of an expression along one variable.
pub fn fd_partial(expr: &Expr, point: &Point, var: &str, h: f64) -> Result<f64> {
    let mut f = |v: f64| {
        let mut q = point.clone();
        q.set(var, v);
        expr.eval(&q)
    };
    let x0 = point
        .get(var)
        .ok_or_else(|| Error::UnboundVariable(var.to_string()))?;
    fd_derivative_oracle(&mut f, x0, h)
}

/// Finite-difference route for Δ ln |∇η|², built entirely from values of η:
/// the gradient is itself estimated by Richardson differences, so no
/// symbolic derivative enters. Used to cross-check the symbolic identity.
pub fn lemma1_fd_residual(eta: &Expr, x: f64, y: f64, h_outer: f64, h_inner: f64) -> Result<f64> {
    let log_rho = |xx: f64, yy: f64| -> Result<f64> {
        let p = Point::of(&[("x", x), ("y", y)]);
        let mut along_x = |v: f64| {
            let mut q = p.clone();
            q.set("x", v);
            q.set("y", yy);
            eta.eval(&q)
        };
        let ex = fd_derivative_oracle(&mut along_x, xx, h_inner)?;
        let mut along_y = |v: f64| {
            let mut q = p.clone();
            q.set("x", xx);
            q.set("y", v);
            eta.eval(&q)
        };
        let ey = fd_derivative_oracle(&mut along_y, yy, h_inner)?;
        let rho = ex * ex + ey * ey;
        if rho <= 0.0 {
            return Err(Error::SkippedSample(format!(
                "estimated |grad|^2 = {rho} at ({xx}, {yy})"
            )));
        }
        Ok(rho.ln())
    };
    let mut fx = |v: f64| log_rho(v, y);
    let mut fy = |v: f64| log_rho(x, v);
    Ok(fd_second_derivative(&mut fx, x, h_outer)? + fd_second_derivative(&mut fy, y, h_outer)?)
}

/// Finite-difference route for the plane residual u_t − Δ ln u, built from
/// values of u only. Slower and noisier than the symbolic oracle; meant for
/// cross-validation, not acceptance tolerances.
pub fn fast_diffusion_residual_fd(field: &Field, spec: &SampleSpec, h: f64) -> Result<ResidualReport> {
    let spatial = split_time(field)?;
    if spatial.len() != 2 {
        return Err(Error::Usage(format!(
            "plane oracle needs two spatial variables, got {spatial:?}"
        )));
    }
    let mut max_abs: f64 = 0.0;
    let mut max_rel: f64 = 0.0;
    let mut argmax: Option<Point> = None;
    let mut n_eval = 0usize;
    let mut n_skip = 0usize;

    'samples: for p in spec.points() {
        if field.is_singular(&p, spec.margin) {
            n_skip += 1;
            continue;
        }
        match field.eval(&p) {
            Ok(v) if v > POSITIVITY_FLOOR => {}
            Ok(_) => {
                n_skip += 1;
                continue;
            }
            Err(e) if is_skippable(&e) => {
                n_skip += 1;
                continue;
            }
            Err(e) => return Err(e),
        }
        let u_t = match fd_partial(field.value(), &p, "t", h) {
            Ok(v) => v,
            Err(e) if is_skippable(&e) => {
                n_skip += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut lap_ln = 0.0;
        for s in &spatial {
            let x0 = p.get(s).expect("signature variable");
            let mut f = |v: f64| {
                let mut q = p.clone();
                q.set(s, v);
                let u = field.eval(&q)?;
                if u <= POSITIVITY_FLOOR {
                    return Err(Error::SkippedSample(format!("u = {u} under the floor")));
                }
                Ok(u.ln())
            };
            match fd_second_derivative(&mut f, x0, h) {
                Ok(v) => lap_ln += v,
                Err(e) if is_skippable(&e) => {
                    n_skip += 1;
                    continue 'samples;
                }
                Err(e) => return Err(e),
            }
        }
        n_eval += 1;
        let r = u_t - lap_ln;
        let abs = r.abs();
        let rel = abs / (1.0 + u_t.abs() + lap_ln.abs());
        max_abs = max_abs.max(abs);
        if rel >= max_rel {
            max_rel = rel;
            argmax = Some(p);
        }
    }
    let mut report = finish_report("fast2d_fd", max_abs, max_rel, argmax, n_eval, n_skip, spec)?;
    report.equation = "fast2d_fd".into();
    Ok(report)
}
