//! Recipe files: JSON descriptions of transformation runs. `construct`
//! turns a recipe into a field with a provenance chain; `verify --recipe`
//! additionally sweeps the result with the oracle for its equation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use fastdiff_core::analytic::sexpr;
use fastdiff_core::transform;
use fastdiff_core::{
    catalog, harmonic_pair, Domain, Error, Expr, Field, HarmonicPair, PairKind, Result,
    SingularSet,
};

/// Conjugate-pair description. `custom` pairs are out of scope for recipe
/// files because they need a caller-declared singular set.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PairSpec {
    Identity,
    Monomial { n: u32 },
    Exponential { k: f64 },
    Affine { a: f64, b: f64, c1: f64, c2: f64 },
}

impl PairSpec {
    fn build(&self) -> Result<HarmonicPair> {
        Ok(match *self {
            PairSpec::Identity => HarmonicPair::identity(),
            PairSpec::Monomial { n } => harmonic_pair(PairKind::Monomial { n })?,
            PairSpec::Exponential { k } => harmonic_pair(PairKind::Exponential { k })?,
            PairSpec::Affine { a, b, c1, c2 } => {
                harmonic_pair(PairKind::Affine { a, b, c1, c2 })?
            }
        })
    }
}

/// Seed of a recipe: a catalog id, or an inline s-expression with an
/// explicit variable signature. Inline seeds carry no singular set, so
/// sampling them near poles is the caller's responsibility.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    Catalog(String),
    Inline { expr: String, vars: Vec<String> },
}

/// Resolves a seed to a field plus a provenance line.
pub fn resolve_seed(spec: &SeedSpec) -> Result<(Field, String)> {
    match spec {
        SeedSpec::Catalog(id) => {
            let entry = catalog::find(id)
                .ok_or_else(|| Error::Config(format!("unknown catalog id `{id}`")))?;
            let line = format!("seed `{id}`: {}", entry.provenance);
            Ok((entry.field, line))
        }
        SeedSpec::Inline { expr, vars } => {
            let value = sexpr::parse(expr)?;
            let names: Vec<&str> = vars.iter().map(String::as_str).collect();
            let field = Field::new(value, &names, SingularSet::none())?;
            Ok((field, format!("inline seed over ({})", vars.join(", "))))
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recipe {
    /// One of `branch`, `reduce`, `conformal`, `liouville_shift`.
    pub op: String,
    #[serde(default)]
    pub pair: Option<PairSpec>,
    pub seed: SeedSpec,
    /// `conformal` only: the positive log-harmonic weight, as an
    /// s-expression over (x, y).
    #[serde(default)]
    pub weight: Option<String>,
    /// Numeric parameters; `liouville_shift` requires `lambda`.
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Sampling box for verification, one [name, lo, hi] per variable.
    #[serde(default)]
    pub domain: Option<Vec<(String, f64, f64)>>,
}

/// Which oracle applies to a constructed field.
#[derive(Debug, Clone)]
pub enum BuiltEquation {
    Plane,
    Weighted(Expr),
    Liouville(f64),
}

impl BuiltEquation {
    pub fn name(&self) -> &'static str {
        match self {
            BuiltEquation::Plane => "fast2d",
            BuiltEquation::Weighted(_) => "weighted",
            BuiltEquation::Liouville(_) => "liouville",
        }
    }
}

/// Serializable construct output: the field as an s-expression plus the
/// chain of decisions that produced it.
#[derive(Debug, Serialize)]
pub struct ConstructReport {
    pub op: String,
    pub equation: String,
    pub field: String,
    pub signature: Vec<String>,
    pub singular_set: String,
    pub params: BTreeMap<String, f64>,
    pub provenance: Vec<String>,
}

pub struct Built {
    pub field: Field,
    pub equation: BuiltEquation,
    pub domain: Option<Domain>,
    pub report: ConstructReport,
}

fn require_pair(recipe: &Recipe) -> Result<HarmonicPair> {
    recipe
        .pair
        .as_ref()
        .ok_or_else(|| Error::Config(format!("op `{}` needs a `pair`", recipe.op)))?
        .build()
}

/// Builds the field a recipe describes.
pub fn build(recipe: &Recipe) -> Result<Built> {
    let (seed, seed_line) = resolve_seed(&recipe.seed)?;
    let mut provenance = vec![seed_line];

    let (field, equation) = match recipe.op.as_str() {
        "branch" => {
            let pair = require_pair(recipe)?;
            provenance.push(format!(
                "branch through {}: u = |grad eta|^2 * v(xi, eta, t)",
                pair.descriptor()
            ));
            (transform::branch(&pair, &seed)?, BuiltEquation::Plane)
        }
        "reduce" => {
            let pair = require_pair(recipe)?;
            provenance.push(format!(
                "reduce along {}: u = |grad eta|^2 * v(eta, t)",
                pair.descriptor()
            ));
            (
                transform::reduce_via_harmonic(&pair, &seed)?,
                BuiltEquation::Plane,
            )
        }
        "conformal" => {
            let text = recipe.weight.as_ref().ok_or_else(|| {
                Error::Config("op `conformal` needs a `weight` s-expression".into())
            })?;
            let f = sexpr::parse(text)?;
            provenance.push(format!(
                "conformal lift by f = {f}: u = |grad f|^2 / f * v(ln f, t)"
            ));
            (
                transform::conformal_lift(&f, &seed)?,
                BuiltEquation::Weighted(f),
            )
        }
        "liouville_shift" => {
            let pair = require_pair(recipe)?;
            let lambda = *recipe.params.get("lambda").ok_or_else(|| {
                Error::Config("op `liouville_shift` needs params.lambda".into())
            })?;
            provenance.push(format!(
                "shift through {}: w -> w(pair) + (1/lambda) ln |grad eta|^2, lambda = {lambda}",
                pair.descriptor()
            ));
            (
                transform::liouville_shift(&seed, &pair, lambda)?,
                BuiltEquation::Liouville(lambda),
            )
        }
        other => {
            return Err(Error::Config(format!(
                "unknown op `{other}` (expected branch, reduce, conformal, or liouville_shift)"
            )))
        }
    };

    let domain = match &recipe.domain {
        Some(bounds) => {
            let borrowed: Vec<(&str, f64, f64)> =
                bounds.iter().map(|(n, lo, hi)| (n.as_str(), *lo, *hi)).collect();
            Some(Domain::of(&borrowed)?)
        }
        None => None,
    };

    let report = ConstructReport {
        op: recipe.op.clone(),
        equation: equation.name().into(),
        field: field.value().to_string(),
        signature: field.signature().to_vec(),
        singular_set: field.singular().description().into(),
        params: recipe.params.clone(),
        provenance,
    };

    Ok(Built {
        field,
        equation,
        domain,
        report,
    })
}
