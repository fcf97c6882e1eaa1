//! Scalar fields: an expression plus a variable signature, singular set,
//! and a cache of derived partials.
//!
//! A [`Field`] is the unit every residual operator and transformation works
//! on: u(x,y,t), v(η,t), w(x,y) are all Fields with different signatures.
//! Partial-derivative expressions are derived lazily and memoized; the cache
//! is behind a mutex so a Field stays shareable across threads.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::analytic::expr::{Expr, Point};
use crate::analytic::singular::SingularSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Field {
    value: Expr,
    signature: Vec<String>,
    singular: SingularSet,
    partials: Arc<Mutex<HashMap<(String, u8), Expr>>>,
}

impl Field {
    /// Creates a field over the ordered variable list `signature`.
    /// Every free variable of `value` must appear in the signature; unused
    /// signature variables are fine (a steady field may ignore t).
    pub fn new(value: Expr, signature: &[&str], singular: SingularSet) -> Result<Field> {
        let mut seen = Vec::new();
        for name in signature {
            if seen.contains(name) {
                return Err(Error::Usage(format!(
                    "duplicate variable `{name}` in field signature"
                )));
            }
            seen.push(name);
        }
        let unbound: Vec<String> = value
            .free_vars()
            .into_iter()
            .filter(|v| !signature.contains(&v.as_str()))
            .collect();
        if !unbound.is_empty() {
            return Err(Error::Usage(format!(
                "field value mentions {unbound:?} outside signature {signature:?}"
            )));
        }
        Ok(Field {
            value,
            signature: signature.iter().map(|s| s.to_string()).collect(),
            singular,
            partials: Arc::new(Mutex::new(HashMap::new())),
        })
    }

    pub fn value(&self) -> &Expr {
        &self.value
    }

    pub fn signature(&self) -> &[String] {
        &self.signature
    }

    pub fn singular(&self) -> &SingularSet {
        &self.singular
    }

    /// Replaces the singular set (used by transforms composing new bands).
    pub fn with_singular(mut self, singular: SingularSet) -> Field {
        self.singular = singular;
        self
    }

    fn check_var(&self, var: &str) -> Result<()> {
        if self.signature.iter().any(|v| v == var) {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "variable `{var}` is not in field signature {:?}",
                self.signature
            )))
        }
    }

    /// First partial with respect to `var`, memoized.
    pub fn partial(&self, var: &str) -> Result<Expr> {
        self.check_var(var)?;
        let key = (var.to_owned(), 1);
        let mut cache = self.partials.lock().unwrap_or_else(|e| e.into_inner());
        let entry = cache
            .entry(key)
            .or_insert_with(|| self.value.differentiate(var));
        Ok(entry.clone())
    }

    /// Second partial ∂²/∂var², memoized.
    pub fn partial2(&self, var: &str) -> Result<Expr> {
        let first = self.partial(var)?;
        let key = (var.to_owned(), 2);
        let mut cache = self.partials.lock().unwrap_or_else(|e| e.into_inner());
        let entry = cache.entry(key).or_insert_with(|| first.differentiate(var));
        Ok(entry.clone())
    }

    pub fn eval(&self, point: &Point) -> Result<f64> {
        self.value.eval(point)
    }

    pub fn is_singular(&self, point: &Point, margin: f64) -> bool {
        self.singular.contains(point, margin)
    }

    /// The field shifted by a constant: u + eps. Used as the corruption
    /// control in verification sweeps; keeps signature and singular set.
    pub fn perturbed(&self, eps: f64) -> Field {
        Field {
            value: self.value.clone() + Expr::constant(eps),
            signature: self.signature.clone(),
            singular: self.singular.clone(),
            partials: Arc::new(Mutex::new(HashMap::new())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_field() -> Field {
        let x = Expr::var("x");
        let y = Expr::var("y");
        Field::new(
            (x.powi(2) + y.powi(2)).tanh(),
            &["x", "y"],
            SingularSet::none(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_unbound_signature() {
        let err = Field::new(Expr::var("z"), &["x", "y"], SingularSet::none()).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
        let err = Field::new(Expr::var("x"), &["x", "x"], SingularSet::none()).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn unused_signature_variable_is_allowed() {
        // A steady field carries t in its signature without referencing it.
        let f = Field::new(Expr::var("x"), &["x", "t"], SingularSet::none()).unwrap();
        assert_eq!(f.partial("t").unwrap().eval(&Point::new()).unwrap(), 0.0);
    }

    #[test]
    fn partials_are_cached_and_correct() {
        let f = sample_field();
        let p = Point::of(&[("x", 0.3), ("y", -0.6)]);
        let d1 = f.partial("x").unwrap();
        let d2 = f.partial("x").unwrap();
        // Same cached tree (cheap Arc clone), identical values.
        assert_eq!(d1, d2);
        let h = 1e-5;
        let up = f.eval(&Point::of(&[("x", 0.3 + h), ("y", -0.6)])).unwrap();
        let lo = f.eval(&Point::of(&[("x", 0.3 - h), ("y", -0.6)])).unwrap();
        let fd = (up - lo) / (2.0 * h);
        let exact = d1.eval(&p).unwrap();
        assert!((exact - fd).abs() < 1e-5 * (1.0 + exact.abs()));
    }

    #[test]
    fn perturbation_shifts_values() {
        let f = sample_field();
        let p = Point::of(&[("x", 0.5), ("y", 0.5)]);
        let base = f.eval(&p).unwrap();
        let shifted = f.perturbed(0.01).eval(&p).unwrap();
        assert!((shifted - base - 0.01).abs() < 1e-15);
    }

    #[test]
    fn partial_of_foreign_variable_is_usage_error() {
        let f = sample_field();
        assert!(matches!(f.partial("q"), Err(Error::Usage(_))));
    }
}
