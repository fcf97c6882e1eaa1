//! Conjugate harmonic pairs and their numerical identity checks.
//!
//! A [`HarmonicPair`] holds two plane potentials ξ(x,y), η(x,y) whose
//! combination ξ + iη is analytic, together with cached first partials and a
//! declared singular set. Built-in constructors produce pairs that are
//! conjugate by construction; [`HarmonicPair::custom`] validates a
//! user-supplied pair by sampling the Cauchy-Riemann and harmonicity
//! residuals and rejects it with the worst offending sample.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analytic::expr::{Expr, Point};
use crate::analytic::singular::{SingularSet, DEFAULT_MARGIN};
use crate::error::{Error, Result};

/// Seed for the deterministic sample draw inside custom-pair validation.
const VALIDATION_SEED: u64 = 0x7a1d_5eed;

/// Relative tolerance for the sampled conjugacy checks.
const CONJUGACY_TOL: f64 = 1e-8;

/// Descriptor of a built-in pair construction.
#[derive(Debug, Clone)]
pub enum PairKind {
    /// Real and imaginary parts of zⁿ, built by the Cartesian recurrence
    /// ξ_{k+1} = x ξ_k − y η_k, η_{k+1} = x η_k + y ξ_k. This sidesteps the
    /// polar arccos/arcsin branch ambiguity entirely.
    Monomial { n: u32 },
    /// ξ = e^{kx} cos(ky), η = e^{kx} sin(ky): real and imaginary parts
    /// of exp(kz).
    Exponential { k: f64 },
    /// ξ = a x + b y + c₁, η = −b x + a y + c₂: the general degree-1
    /// conjugate pair (rotation + scaling + shift).
    Affine { a: f64, b: f64, c1: f64, c2: f64 },
    /// Caller-supplied pair; validated by sampling. The caller declares the
    /// singular set, since pole discovery is out of scope.
    Custom {
        xi: Expr,
        eta: Expr,
        singular: SingularSet,
    },
}

#[derive(Debug, Clone)]
pub struct HarmonicPair {
    xi: Expr,
    eta: Expr,
    xi_x: Expr,
    xi_y: Expr,
    eta_x: Expr,
    eta_y: Expr,
    singular: SingularSet,
    descriptor: String,
}

/// Builds a pair from a descriptor. Equivalent to the inherent
/// constructors; exists so recipe-driven callers can stay data-oriented.
pub fn harmonic_pair(kind: PairKind) -> Result<HarmonicPair> {
    match kind {
        PairKind::Monomial { n } => HarmonicPair::monomial(n),
        PairKind::Exponential { k } => HarmonicPair::exponential(k),
        PairKind::Affine { a, b, c1, c2 } => HarmonicPair::affine(a, b, c1, c2),
        PairKind::Custom { xi, eta, singular } => HarmonicPair::custom(xi, eta, singular),
    }
}

impl HarmonicPair {
    fn assemble(xi: Expr, eta: Expr, singular: SingularSet, descriptor: String) -> HarmonicPair {
        HarmonicPair {
            xi_x: xi.differentiate("x"),
            xi_y: xi.differentiate("y"),
            eta_x: eta.differentiate("x"),
            eta_y: eta.differentiate("y"),
            xi,
            eta,
            singular,
            descriptor,
        }
    }

    /// Re/Im of zⁿ for n ≥ 1.
    pub fn monomial(n: u32) -> Result<HarmonicPair> {
        if n == 0 {
            return Err(Error::Parameter("monomial degree must be >= 1".into()));
        }
        let x = Expr::var("x");
        let y = Expr::var("y");
        let mut xi = x.clone();
        let mut eta = y.clone();
        for _ in 1..n {
            let next_xi = &x * &xi - &y * &eta;
            let next_eta = &x * &eta + &y * &xi;
            xi = next_xi;
            eta = next_eta;
        }
        Ok(HarmonicPair::assemble(
            xi,
            eta,
            SingularSet::none(),
            format!("monomial({n})"),
        ))
    }

    /// Re/Im of exp(kz) for k ≠ 0.
    pub fn exponential(k: f64) -> Result<HarmonicPair> {
        if k == 0.0 || !k.is_finite() {
            return Err(Error::Parameter(format!(
                "exponential pair requires finite k != 0, got {k}"
            )));
        }
        let kx = Expr::constant(k) * Expr::var("x");
        let ky = Expr::constant(k) * Expr::var("y");
        let xi = kx.clone().exp() * ky.clone().cos();
        let eta = kx.exp() * ky.sin();
        Ok(HarmonicPair::assemble(
            xi,
            eta,
            SingularSet::none(),
            format!("exponential({k})"),
        ))
    }

    /// Degree-1 pair with CR-consistent coefficients; requires (a,b) ≠ (0,0).
    pub fn affine(a: f64, b: f64, c1: f64, c2: f64) -> Result<HarmonicPair> {
        if a == 0.0 && b == 0.0 {
            return Err(Error::Parameter(
                "affine pair requires (a, b) != (0, 0)".into(),
            ));
        }
        for (name, v) in [("a", a), ("b", b), ("c1", c1), ("c2", c2)] {
            if !v.is_finite() {
                return Err(Error::Parameter(format!("affine coefficient {name} = {v}")));
            }
        }
        let x = Expr::var("x");
        let y = Expr::var("y");
        let xi = Expr::constant(a) * &x + Expr::constant(b) * &y + Expr::constant(c1);
        let eta = Expr::constant(-b) * &x + Expr::constant(a) * &y + Expr::constant(c2);
        let descriptor = if (a, b, c1, c2) == (1.0, 0.0, 0.0, 0.0) {
            "identity".to_owned()
        } else {
            format!("affine({a}, {b}, {c1}, {c2})")
        };
        Ok(HarmonicPair::assemble(xi, eta, SingularSet::none(), descriptor))
    }

    /// The identity pair ξ = x, η = y.
    pub fn identity() -> HarmonicPair {
        HarmonicPair::affine(1.0, 0.0, 0.0, 0.0).expect("identity coefficients are valid")
    }

    /// Validates a caller-supplied pair by sampling conjugacy residuals on
    /// [−1.5, 1.5]² (skipping the declared singular set) and rejects it with
    /// the worst sample on failure.
    pub fn custom(xi: Expr, eta: Expr, singular: SingularSet) -> Result<HarmonicPair> {
        for (name, e) in [("xi", &xi), ("eta", &eta)] {
            let extra: Vec<String> = e
                .free_vars()
                .into_iter()
                .filter(|v| v != "x" && v != "y")
                .collect();
            if !extra.is_empty() {
                return Err(Error::Usage(format!(
                    "{name} must depend only on (x, y); found {extra:?}"
                )));
            }
        }
        let pair = HarmonicPair::assemble(xi, eta, singular, "custom".to_owned());
        pair.validate_conjugacy()?;
        Ok(pair)
    }

    fn validate_conjugacy(&self) -> Result<()> {
        let lap_xi = self.xi_x.differentiate("x") + self.xi_y.differentiate("y");
        let lap_eta = self.eta_x.differentiate("x") + self.eta_y.differentiate("y");
        let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED);
        let mut accepted = 0usize;
        // Worst sample over the whole draw: (score, r1, r2, x, y).
        let mut worst = (0.0f64, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..256 {
            if accepted >= 48 {
                break;
            }
            let x = rng.random_range(-1.5..1.5);
            let y = rng.random_range(-1.5..1.5);
            let p = Point::of(&[("x", x), ("y", y)]);
            if self.singular.contains(&p, DEFAULT_MARGIN) {
                continue;
            }
            let evals = (
                self.xi_x.eval(&p),
                self.xi_y.eval(&p),
                self.eta_x.eval(&p),
                self.eta_y.eval(&p),
                lap_xi.eval(&p),
                lap_eta.eval(&p),
            );
            let (Ok(xx), Ok(xy), Ok(ex), Ok(ey), Ok(lx), Ok(le)) = evals else {
                continue;
            };
            accepted += 1;
            let scale = 1.0 + xx.abs() + xy.abs() + ex.abs() + ey.abs();
            let r1 = (xx - ey).abs() / scale;
            let r2 = (xy + ex).abs() / scale;
            // Harmonicity folded into the same rejection channel: a pair
            // satisfying CR exactly is harmonic, but sampled checks need
            // both to catch near-misses.
            let rh = (lx.abs() + le.abs()) / scale;
            let score = r1.max(r2).max(rh);
            if score > worst.0 {
                worst = (score, r1.max(rh), r2, x, y);
            }
        }
        if accepted < 16 {
            return Err(Error::Degenerate(format!(
                "singular set leaves only {accepted} of 256 validation samples"
            )));
        }
        if worst.0 > CONJUGACY_TOL {
            let (_, r1, r2, x, y) = worst;
            return Err(Error::RejectedPair { r1, r2, x, y });
        }
        Ok(())
    }

    /// Composition (outer ∘ inner): the pair of F(G(z)) where F is `self`
    /// and G is `inner`. Conjugacy is preserved exactly (composition of
    /// analytic maps), so no re-validation is needed.
    pub fn compose(&self, inner: &HarmonicPair) -> HarmonicPair {
        let map = [("x", inner.xi.clone()), ("y", inner.eta.clone())];
        let xi = self.xi.substitute(&map);
        let eta = self.eta.substitute(&map);
        let singular = inner.singular.clone().union(SingularSet::composed(
            self.singular.clone(),
            vec![("x".into(), inner.xi.clone()), ("y".into(), inner.eta.clone())],
        ));
        let descriptor = format!("compose({}, {})", self.descriptor, inner.descriptor);
        HarmonicPair::assemble(xi, eta, singular, descriptor)
    }

    pub fn xi(&self) -> &Expr {
        &self.xi
    }

    pub fn eta(&self) -> &Expr {
        &self.eta
    }

    /// ρ = |∇η|² as an expression; the branching prefactor.
    pub fn grad_sq_eta(&self) -> Expr {
        self.eta_x.clone().powi(2) + self.eta_y.clone().powi(2)
    }

    pub fn singular(&self) -> &SingularSet {
        &self.singular
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    fn partials_at(&self, x: f64, y: f64) -> Result<(f64, f64, f64, f64)> {
        let p = Point::of(&[("x", x), ("y", y)]);
        if self.singular.contains(&p, DEFAULT_MARGIN) {
            return Err(Error::Singular {
                subexpr: self.descriptor.clone(),
                detail: format!("point ({x}, {y}) is inside the declared singular set"),
            });
        }
        Ok((
            self.xi_x.eval(&p)?,
            self.xi_y.eval(&p)?,
            self.eta_x.eval(&p)?,
            self.eta_y.eval(&p)?,
        ))
    }
}

/// Cauchy-Riemann residuals (ξ_x − η_y, ξ_y + η_x) at a point.
/// Both vanish (to rounding) for a conjugate pair.
pub fn cauchy_riemann_residual(pair: &HarmonicPair, x: f64, y: f64) -> Result<(f64, f64)> {
    let (xx, xy, ex, ey) = pair.partials_at(x, y)?;
    Ok((xx - ey, xy + ex))
}

/// Gradient identities at a point: ((∇ξ, ∇η), |∇ξ|² − |∇η|²).
/// Both vanish (to rounding) for a conjugate pair.
pub fn orthogonality_residual(pair: &HarmonicPair, x: f64, y: f64) -> Result<(f64, f64)> {
    let (xx, xy, ex, ey) = pair.partials_at(x, y)?;
    let dot = xx * ex + xy * ey;
    let normdiff = (xx * xx + xy * xy) - (ex * ex + ey * ey);
    Ok((dot, normdiff))
}

/// |∇η|² = η_x² + η_y² as an expression, for any potential over (x, y).
pub fn grad_sq(eta: &Expr) -> Expr {
    eta.differentiate("x").powi(2) + eta.differentiate("y").powi(2)
}

/// Reusable evaluator of Δ ln |∇η|², the quantity that vanishes identically
/// for harmonic η. Critical points of η are genuine singularities of ln ρ,
/// so evaluation below the gradient floor is a skipped sample, not a zero.
#[derive(Debug, Clone)]
pub struct LogGradLaplacian {
    rho: Expr,
    laplacian: Expr,
}

impl LogGradLaplacian {
    pub fn new(eta: &Expr) -> LogGradLaplacian {
        let rho = grad_sq(eta);
        let ln_rho = rho.clone().ln();
        let laplacian = ln_rho.differentiate("x").differentiate("x")
            + ln_rho.differentiate("y").differentiate("y");
        LogGradLaplacian { rho, laplacian }
    }

    pub fn rho(&self) -> &Expr {
        &self.rho
    }

    /// Δ ln ρ at (x, y), or a skipped-sample signal when ρ < floor.
    pub fn residual_at(&self, x: f64, y: f64, floor: f64) -> Result<f64> {
        let p = Point::of(&[("x", x), ("y", y)]);
        let rho = self.rho.eval(&p)?;
        if rho < floor {
            return Err(Error::SkippedSample(format!(
                "|grad eta|^2 = {rho:.3e} below floor {floor:.3e} at ({x}, {y})"
            )));
        }
        self.laplacian.eval(&p)
    }
}

/// One-shot form of [`LogGradLaplacian`] matching the operation signature
/// used by sweeps; prefer the struct inside loops.
pub fn lemma1_residual(eta: &Expr, x: f64, y: f64, floor: f64) -> Result<f64> {
    LogGradLaplacian::new(eta).residual_at(x, y, floor)
}
