//! Solution transformations built on conjugate harmonic pairs.
//!
//! Each map takes a verified solution of a simpler equation and produces a
//! closed-form solution of the target equation, carrying the singular sets
//! along: the output is flagged wherever the pair is flagged, wherever the
//! input was flagged at the mapped coordinates, and wherever the conformal
//! factor |∇η|² drops below the gradient floor.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analytic::expr::{Expr, Point};
use crate::analytic::pair::{grad_sq, HarmonicPair};
use crate::analytic::singular::{SingularSet, GRAD_FLOOR};
use crate::error::{Error, Result};
use crate::field::Field;

/// Splits a field's signature into (spatial variables, has_t) requiring the
/// time variable to be literally named `t`.
fn spatial_of(field: &Field, expected: usize, what: &str) -> Result<Vec<String>> {
    let sig = field.signature();
    if !sig.iter().any(|v| v == "t") {
        return Err(Error::Usage(format!(
            "{what} must carry a time variable `t`, got {sig:?}"
        )));
    }
    let spatial: Vec<String> = sig.iter().filter(|v| *v != "t").cloned().collect();
    if spatial.len() != expected {
        return Err(Error::Usage(format!(
            "{what} must have {expected} spatial variable(s), got {spatial:?}"
        )));
    }
    Ok(spatial)
}

fn grad_floor_set(rho: &Expr) -> SingularSet {
    SingularSet::below(
        "conformal factor |grad eta|^2 below the gradient floor",
        rho.clone(),
        GRAD_FLOOR,
    )
}

/// Maps a plane solution v(ξ,η,t) of u_t = Δ ln u through a conjugate pair:
/// u(x,y,t) = |∇η|² · v(ξ(x,y), η(x,y), t) solves the same equation.
pub fn branch(pair: &HarmonicPair, seed: &Field) -> Result<Field> {
    let spatial = spatial_of(seed, 2, "branch seed")?;
    let rho = pair.grad_sq_eta();
    let mapped = seed.value().substitute(&[
        (spatial[0].as_str(), pair.xi().clone()),
        (spatial[1].as_str(), pair.eta().clone()),
    ]);
    let value = rho.clone() * mapped;
    let singular = pair
        .singular()
        .clone()
        .union(SingularSet::composed(
            seed.singular().clone(),
            vec![
                (spatial[0].clone(), pair.xi().clone()),
                (spatial[1].clone(), pair.eta().clone()),
                ("t".into(), Expr::var("t")),
            ],
        ))
        .union(grad_floor_set(&rho));
    Field::new(value, &["x", "y", "t"], singular)
}

/// A vector-valued source term f(u₁, …, u_n), one expression per component,
/// over the listed component variables.
#[derive(Debug, Clone)]
pub struct VectorSource {
    vars: Vec<String>,
    components: Vec<Expr>,
}

impl VectorSource {
    pub fn new(vars: &[&str], components: Vec<Expr>) -> Result<VectorSource> {
        if vars.is_empty() || components.is_empty() {
            return Err(Error::Usage("source needs at least one component".into()));
        }
        for c in &components {
            for v in c.free_vars() {
                if !vars.iter().any(|n| *n == v) {
                    return Err(Error::Usage(format!(
                        "source component uses unknown variable `{v}`"
                    )));
                }
            }
        }
        Ok(VectorSource {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            components,
        })
    }

    pub fn arity(&self) -> usize {
        self.components.len()
    }

    pub fn eval(&self, args: &[f64]) -> Result<Vec<f64>> {
        if args.len() != self.vars.len() {
            return Err(Error::Usage(format!(
                "source expects {} arguments, got {}",
                self.vars.len(),
                args.len()
            )));
        }
        let mut p = Point::new();
        for (name, v) in self.vars.iter().zip(args) {
            p.set(name, *v);
        }
        self.components.iter().map(|c| c.eval(&p)).collect()
    }
}

/// Worst relative deviation of f(ρ·v) from ρ·f(v) over a deterministic
/// cloud of positive arguments and scalings. Zero (to rounding) exactly
/// when the source is positively homogeneous of degree one, which is the
/// condition under which [`lift_system`] preserves solutions.
pub fn homogeneity_residual(source: &VectorSource, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Usage("homogeneity check needs samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let args: Vec<f64> = (0..source.vars.len())
            .map(|_| rng.random_range(0.2..2.0))
            .collect();
        let rho: f64 = rng.random_range(0.2..3.0);
        let scaled: Vec<f64> = args.iter().map(|a| rho * a).collect();
        let f_scaled = source.eval(&scaled)?;
        let f_plain = source.eval(&args)?;
        for (fs, fp) in f_scaled.iter().zip(&f_plain) {
            let dev = (fs - rho * fp).abs() / (1.0 + (rho * fp).abs());
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}

/// Maps every component of a reaction system u_{i,t} = Δ ln u_i + f_i(u)
/// through a conjugate pair, u_i = |∇η|² v_i(ξ,η,t). Valid only for
/// degree-1 positively homogeneous sources, which is validated up front.
pub fn lift_system(
    pair: &HarmonicPair,
    seeds: &[Field],
    source: &VectorSource,
) -> Result<Vec<Field>> {
    if seeds.len() != source.arity() {
        return Err(Error::Usage(format!(
            "system has {} components but source has {}",
            seeds.len(),
            source.arity()
        )));
    }
    let dev = homogeneity_residual(source, 128, 0x5ca1e)?;
    if dev > 1e-9 {
        return Err(Error::Precondition(format!(
            "source is not positively homogeneous of degree one: \
             worst relative deviation {dev:.3e}"
        )));
    }
    seeds.iter().map(|s| branch(pair, s)).collect()
}

/// Maps a reduced solution v(η,t) of v_t = (ln v)_ηη through the second
/// member of a conjugate pair: u(x,y,t) = |∇η|² · v(η(x,y), t) solves the
/// plane equation u_t = Δ ln u.
pub fn reduce_via_harmonic(pair: &HarmonicPair, reduced: &Field) -> Result<Field> {
    let spatial = spatial_of(reduced, 1, "reduced solution")?;
    let rho = pair.grad_sq_eta();
    let mapped = reduced
        .value()
        .substitute(&[(spatial[0].as_str(), pair.eta().clone())]);
    let value = rho.clone() * mapped;
    let singular = pair
        .singular()
        .clone()
        .union(SingularSet::composed(
            reduced.singular().clone(),
            vec![
                (spatial[0].clone(), pair.eta().clone()),
                ("t".into(), Expr::var("t")),
            ],
        ))
        .union(grad_floor_set(&rho));
    Field::new(value, &["x", "y", "t"], singular)
}

/// Validates that a weight is positive with harmonic logarithm on a fixed
/// plane lattice, returning Δ-checked ln f material for reuse.
fn validate_positive_log_harmonic(f: &Expr) -> Result<()> {
    let extra: Vec<String> = f
        .free_vars()
        .into_iter()
        .filter(|v| v != "x" && v != "y")
        .collect();
    if !extra.is_empty() {
        return Err(Error::Usage(format!(
            "weight must depend only on (x, y); found {extra:?}"
        )));
    }
    let fx = f.differentiate("x");
    let fy = f.differentiate("y");
    let lap_ln = Expr::add(vec![
        Expr::div(fx, f.clone()).differentiate("x"),
        Expr::div(fy, f.clone()).differentiate("y"),
    ]);
    let mut checked = 0usize;
    for i in 0..7 {
        for j in 0..7 {
            let p = Point::of(&[("x", -1.32 + 0.44 * i as f64), ("y", -1.26 + 0.42 * j as f64)]);
            let Ok(fv) = f.eval(&p) else { continue };
            if fv <= 0.0 {
                return Err(Error::Precondition(format!(
                    "weight must be positive, got {fv} at {p}"
                )));
            }
            let Ok(r) = lap_ln.eval(&p) else { continue };
            checked += 1;
            if r.abs() > 1e-7 * (1.0 + r.abs()) {
                return Err(Error::Precondition(format!(
                    "weight is not log-harmonic: |laplacian ln f| = {:.3e} at {p}",
                    r.abs()
                )));
            }
        }
    }
    if checked < 10 {
        return Err(Error::Precondition(
            "weight could not be evaluated on the validation lattice".into(),
        ));
    }
    Ok(())
}

/// Lifts a reduced solution v(η,t) into the weighted plane equation
/// u_t = f · Δ ln u: u = (f_x² + f_y²)/f · v(ln f, t). Requires f > 0 with
/// Δ ln f = 0; the reduced coordinate is η = ln f.
pub fn conformal_lift(f: &Expr, reduced: &Field) -> Result<Field> {
    let spatial = spatial_of(reduced, 1, "reduced solution")?;
    validate_positive_log_harmonic(f)?;
    let g = f.clone().ln();
    let rho_g = grad_sq(&g);
    let prefactor = Expr::div(
        f.differentiate("x").powi(2) + f.differentiate("y").powi(2),
        f.clone(),
    );
    let mapped = reduced.value().substitute(&[(spatial[0].as_str(), g.clone())]);
    let value = prefactor * mapped;
    let singular = SingularSet::below("weight below the positivity floor", f.clone(), 1e-6)
        .union(grad_floor_set(&rho_g))
        .union(SingularSet::composed(
            reduced.singular().clone(),
            vec![(spatial[0].clone(), g), ("t".into(), Expr::var("t"))],
        ));
    Field::new(value, &["x", "y", "t"], singular)
}

/// Maps a steady Liouville solution through a conjugate pair:
/// if Δw = exp(λw) then w̃ = w(ξ(x,y), η(x,y)) + (1/λ) ln|∇η|² / λ... the
/// additive correction (1/λ) ln |∇η|² restores the conformal factor, so
/// w̃ solves the same equation in the new coordinates.
pub fn liouville_shift(w: &Field, pair: &HarmonicPair, lambda: f64) -> Result<Field> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Parameter(format!(
            "lambda must be finite and nonzero, got {lambda}"
        )));
    }
    let sig = w.signature().to_vec();
    if sig.len() != 2 {
        return Err(Error::Usage(format!(
            "shift needs a steady two-variable solution, got {sig:?}"
        )));
    }
    let rho = pair.grad_sq_eta();
    let mapped = w.value().substitute(&[
        (sig[0].as_str(), pair.xi().clone()),
        (sig[1].as_str(), pair.eta().clone()),
    ]);
    let value = mapped + Expr::constant(1.0 / lambda) * rho.clone().abs().ln();
    let singular = pair
        .singular()
        .clone()
        .union(SingularSet::composed(
            w.singular().clone(),
            vec![
                (sig[0].clone(), pair.xi().clone()),
                (sig[1].clone(), pair.eta().clone()),
            ],
        ))
        .union(grad_floor_set(&rho));
    Field::new(value, &["x", "y"], singular)
}
