//! Declared singular sets.
//!
//! Singular sets are conservative predicates over evaluation points, not
//! automatically discovered pole loci. Constructors of catalog entries,
//! pairs, and transforms declare where a formula or its derivatives break
//! down (poles of tan/coth, zeros of a denominator, critical points of a
//! potential, the parabolic time floor), and residual sweeps skip flagged
//! samples. A predicate receives the sweep's margin so pole bands can be
//! widened uniformly; predicates with intrinsic scales may ignore it.

use std::fmt;
use std::sync::Arc;

use crate::analytic::expr::{Expr, Point};

type Pred = Arc<dyn Fn(&Point, f64) -> bool + Send + Sync>;

/// Default half-width of singular bands, in argument units.
pub const DEFAULT_MARGIN: f64 = 1e-3;

/// Gradient-magnitude floor below which log-gradient quantities are
/// treated as singular (critical points of a harmonic potential).
pub const GRAD_FLOOR: f64 = 1e-2;

#[derive(Clone)]
pub struct SingularSet {
    description: String,
    pred: Pred,
}

impl fmt::Debug for SingularSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SingularSet")
            .field("description", &self.description)
            .finish()
    }
}

impl SingularSet {
    /// The empty singular set.
    pub fn none() -> Self {
        SingularSet {
            description: "none".into(),
            pred: Arc::new(|_, _| false),
        }
    }

    pub fn from_fn(
        description: impl Into<String>,
        pred: impl Fn(&Point, f64) -> bool + Send + Sync + 'static,
    ) -> Self {
        SingularSet {
            description: description.into(),
            pred: Arc::new(pred),
        }
    }

    /// Points where `expr` is within `margin` of zero, or fails to evaluate.
    /// Evaluation failure is treated as singular: the set must be
    /// conservative.
    pub fn near_zero(description: impl Into<String>, expr: Expr) -> Self {
        SingularSet::from_fn(description, move |p, margin| match expr.eval(p) {
            Ok(v) => v.abs() < margin.max(f64::MIN_POSITIVE),
            Err(_) => true,
        })
    }

    /// Points where `expr` evaluates below `floor` (or fails to evaluate).
    /// Used for gradient floors and positivity requirements with intrinsic
    /// scales; the sweep margin is ignored.
    pub fn below(description: impl Into<String>, expr: Expr, floor: f64) -> Self {
        SingularSet::from_fn(description, move |p, _| match expr.eval(p) {
            Ok(v) => v < floor,
            Err(_) => true,
        })
    }

    /// Points where the argument expression is within `margin` of a pole of
    /// tan or sec (odd multiples of π/2).
    pub fn tan_pole(description: impl Into<String>, argument: Expr) -> Self {
        SingularSet::from_fn(description, move |p, margin| match argument.eval(p) {
            Ok(v) => {
                let k = (v / std::f64::consts::PI - 0.5).round();
                let pole = (k + 0.5) * std::f64::consts::PI;
                (v - pole).abs() < margin.max(f64::MIN_POSITIVE)
            }
            Err(_) => true,
        })
    }

    /// Points where the named variable lies below `floor` (the parabolic
    /// time floor for tanh-based entries). Ignores the sweep margin.
    pub fn var_below(description: impl Into<String>, var: &str, floor: f64) -> Self {
        let var = var.to_owned();
        SingularSet::from_fn(description, move |p, _| match p.get(&var) {
            Some(v) => v < floor,
            None => true,
        })
    }

    /// Union of two singular sets.
    pub fn union(self, other: SingularSet) -> SingularSet {
        if other.is_none() {
            return self;
        }
        if self.is_none() {
            return other;
        }
        let description = format!("{}; {}", self.description, other.description);
        let a = self.pred;
        let b = other.pred;
        SingularSet {
            description,
            pred: Arc::new(move |p, m| a(p, m) || b(p, m)),
        }
    }

    /// Preimage of `outer` under the variable map `vars`: the returned set
    /// flags a point when the mapped point is flagged by `outer`. Variables
    /// absent from the map pass through unchanged.
    pub fn composed(outer: SingularSet, vars: Vec<(String, Expr)>) -> SingularSet {
        let description = format!("{} (composed)", outer.description);
        let pred = outer.pred;
        SingularSet {
            description,
            pred: Arc::new(move |p, m| {
                let mut mapped = p.clone();
                for (name, expr) in &vars {
                    match expr.eval(p) {
                        Ok(v) => mapped.set(name, v),
                        Err(_) => return true,
                    }
                }
                pred(&mapped, m)
            }),
        }
    }

    fn is_none(&self) -> bool {
        self.description == "none"
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// True when `point` is inside the singular band at the given margin.
    pub fn contains(&self, point: &Point, margin: f64) -> bool {
        (self.pred)(point, margin)
    }
}
