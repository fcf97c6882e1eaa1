//! Profile ODEs for the coupled elliptic system
//!
//! ```text
//! Δu = exp(u) + A|∇Φ|²,   Δv = exp(v) − B|∇Φ|²,   ΔΦ = exp(v) − exp(u)
//! ```
//!
//! With u = F(η) + ln|∇η|², v = Ψ(η) + ln|∇η|², Φ = φ(η) along a harmonic
//! potential η, the system collapses to profile ODEs in one variable:
//!
//! ```text
//! F'' = exp(F) + A (φ')²,   Ψ'' = exp(Ψ) − B (φ')²,   φ'' = exp(Ψ) − exp(F)
//! ```
//!
//! This module integrates the profiles with fixed-step RK4, stores a C²
//! dense output (quintic Hermite through value, first and second
//! derivatives at the nodes), and wraps the result as plane fields so the
//! elliptic oracle can check the full two-dimensional system.

use std::sync::Arc;

use crate::analytic::expr::{Expr, Point};
use crate::analytic::singular::GRAD_FLOOR;
use crate::catalog::validate_harmonic;
use crate::error::{Error, Result};
use crate::verify::{Jet2, PlaneField};

/// State layout: y = [F, F', Ψ, Ψ', φ, φ'].
pub type State = [f64; 6];

#[derive(Debug, Clone)]
pub struct OdeParams {
    pub a: f64,
    pub b: f64,
    pub initial: State,
    pub eta0: f64,
    pub eta1: f64,
    pub steps: usize,
}

#[derive(Debug, Clone)]
struct Node {
    y: State,
    dy: State,
    d2y: State,
}

/// Integrated profiles with dense evaluation of value, first and second
/// derivative for each of F, Ψ, φ.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub a: f64,
    pub b: f64,
    eta0: f64,
    h: f64,
    nodes: Vec<Node>,
}

fn rhs(a: f64, b: f64, y: &State) -> State {
    let r2 = y[5] * y[5];
    [
        y[1],
        y[0].exp() + a * r2,
        y[3],
        y[2].exp() - b * r2,
        y[5],
        y[2].exp() - y[0].exp(),
    ]
}

/// d/dη of the right-hand side along a trajectory, used for the C² dense
/// output: y'' at a node is exactly J_rhs(y) · y'.
fn second(a: f64, b: f64, y: &State) -> State {
    let d = rhs(a, b, y);
    let dphi2 = 2.0 * y[5] * d[5];
    [
        d[1],
        y[0].exp() * y[1] + a * dphi2,
        d[3],
        y[2].exp() * y[3] - b * dphi2,
        d[5],
        y[2].exp() * y[3] - y[0].exp() * y[1],
    ]
}

pub fn integrate_ode22(params: &OdeParams) -> Result<Trajectory> {
    if !(params.eta0.is_finite() && params.eta1.is_finite() && params.eta0 < params.eta1) {
        return Err(Error::SolverInput(format!(
            "bad profile interval [{}, {}]",
            params.eta0, params.eta1
        )));
    }
    if params.steps < 2 {
        return Err(Error::SolverInput(format!(
            "need at least 2 integration steps, got {}",
            params.steps
        )));
    }
    if !(params.a.is_finite() && params.b.is_finite()) {
        return Err(Error::SolverInput(format!(
            "non-finite coupling ({}, {})",
            params.a, params.b
        )));
    }
    let h = (params.eta1 - params.eta0) / params.steps as f64;
    let (a, b) = (params.a, params.b);
    let mut y = params.initial;
    let mut nodes = Vec::with_capacity(params.steps + 1);
    nodes.push(Node {
        y,
        dy: rhs(a, b, &y),
        d2y: second(a, b, &y),
    });
    for step in 0..params.steps {
        let k1 = rhs(a, b, &y);
        let mut y2 = y;
        for i in 0..6 {
            y2[i] = y[i] + 0.5 * h * k1[i];
        }
        let k2 = rhs(a, b, &y2);
        let mut y3 = y;
        for i in 0..6 {
            y3[i] = y[i] + 0.5 * h * k2[i];
        }
        let k3 = rhs(a, b, &y3);
        let mut y4 = y;
        for i in 0..6 {
            y4[i] = y[i] + h * k3[i];
        }
        let k4 = rhs(a, b, &y4);
        for i in 0..6 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "profile integration blew up at eta = {}",
                params.eta0 + (step + 1) as f64 * h
            )));
        }
        nodes.push(Node {
            y,
            dy: rhs(a, b, &y),
            d2y: second(a, b, &y),
        });
    }
    Ok(Trajectory {
        a,
        b,
        eta0: params.eta0,
        h,
        nodes,
    })
}

/// Which profile a dense evaluation reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    F,
    Psi,
    Phi,
}

impl Profile {
    fn slot(self) -> usize {
        match self {
            Profile::F => 0,
            Profile::Psi => 2,
            Profile::Phi => 4,
        }
    }
}

impl Trajectory {
    pub fn eta_range(&self) -> (f64, f64) {
        (self.eta0, self.eta0 + self.h * (self.nodes.len() - 1) as f64)
    }

    pub fn final_state(&self) -> State {
        self.nodes.last().expect("at least two nodes").y
    }

    /// Worst |φ''| along the nodes, where φ'' is the coupling expression
    /// exp(Ψ) − exp(F) evaluated on the integrated states.
    pub fn max_abs_phi_second(&self) -> f64 {
        self.nodes
            .iter()
            .fold(0.0f64, |m, n| m.max(n.dy[5].abs()))
    }

    /// Dense (value, d/dη, d²/dη²) for one profile. Quintic Hermite on the
    /// step interval: exact at nodes in value, first and second derivative.
    pub fn eval(&self, profile: Profile, eta: f64) -> Result<(f64, f64, f64)> {
        let (lo, hi) = self.eta_range();
        if !(eta >= lo && eta <= hi) {
            return Err(Error::SkippedSample(format!(
                "eta = {eta} outside the integrated range [{lo}, {hi}]"
            )));
        }
        let raw = ((eta - self.eta0) / self.h).floor() as usize;
        let k = raw.min(self.nodes.len() - 2);
        let s = (eta - (self.eta0 + k as f64 * self.h)) / self.h;
        let (n0, n1) = (&self.nodes[k], &self.nodes[k + 1]);
        let i = profile.slot();
        let h = self.h;
        let (y0, d0, c0) = (n0.y[i], n0.dy[i] * h, n0.d2y[i] * h * h);
        let (y1, d1, c1) = (n1.y[i], n1.dy[i] * h, n1.d2y[i] * h * h);

        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        let s5 = s4 * s;
        // Two-point C2 quintic basis.
        let b0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
        let b1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
        let b2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
        let b3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
        let b4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
        let b5 = 0.5 * s3 - s4 + 0.5 * s5;
        let value = y0 * b0 + d0 * b1 + c0 * b2 + y1 * b3 + d1 * b4 + c1 * b5;

        let db0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
        let db1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
        let db2 = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4;
        let db3 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;
        let db4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
        let db5 = 1.5 * s2 - 4.0 * s3 + 2.5 * s4;
        let d1v = (y0 * db0 + d0 * db1 + c0 * db2 + y1 * db3 + d1 * db4 + c1 * db5) / h;

        let c0b = -60.0 * s + 180.0 * s2 - 120.0 * s3;
        let c1b = -36.0 * s + 96.0 * s2 - 60.0 * s3;
        let c2b = 1.0 - 9.0 * s + 18.0 * s2 - 10.0 * s3;
        let c3b = 60.0 * s - 180.0 * s2 + 120.0 * s3;
        let c4b = -24.0 * s + 84.0 * s2 - 60.0 * s3;
        let c5b = 3.0 * s - 12.0 * s2 + 10.0 * s3;
        let d2v = (y0 * c0b + d0 * c1b + c0 * c2b + y1 * c3b + d1 * c4b + c1 * c5b) / (h * h);

        Ok((value, d1v, d2v))
    }
}

/// A plane field assembled from an integrated profile along a harmonic
/// potential: profile(η(x,y)) plus, for the two logarithmic components,
/// ln|∇η|². Implements the jet interface the elliptic system oracle needs.
pub struct AnsatzField {
    profile: Profile,
    traj: Arc<Trajectory>,
    eta: Expr,
    eta_x: Expr,
    eta_y: Expr,
    eta_xx: Expr,
    eta_yy: Expr,
    rho: Expr,
    log_rho: Option<LogRho>,
}

struct LogRho {
    value: Expr,
    x: Expr,
    y: Expr,
    xx: Expr,
    yy: Expr,
}

impl AnsatzField {
    pub fn new(profile: Profile, traj: Arc<Trajectory>, eta: &Expr) -> Result<AnsatzField> {
        let rho = validate_harmonic(eta)?;
        let eta_x = eta.differentiate("x");
        let eta_y = eta.differentiate("y");
        let log_rho = if profile == Profile::Phi {
            None
        } else {
            let value = rho.clone().ln();
            let x = value.differentiate("x");
            let y = value.differentiate("y");
            Some(LogRho {
                xx: x.differentiate("x"),
                yy: y.differentiate("y"),
                value,
                x,
                y,
            })
        };
        Ok(AnsatzField {
            profile,
            traj,
            eta: eta.clone(),
            eta_xx: eta_x.differentiate("x"),
            eta_yy: eta_y.differentiate("y"),
            eta_x,
            eta_y,
            rho,
            log_rho,
        })
    }
}

impl PlaneField for AnsatzField {
    fn jet(&self, x: f64, y: f64) -> Result<Jet2> {
        let p = Point::of(&[("x", x), ("y", y)]);
        let ev = self.eta.eval(&p)?;
        let (f, f1, f2) = self.traj.eval(self.profile, ev)?;
        let ex = self.eta_x.eval(&p)?;
        let ey = self.eta_y.eval(&p)?;
        let exx = self.eta_xx.eval(&p)?;
        let eyy = self.eta_yy.eval(&p)?;
        let mut jet = Jet2 {
            v: f,
            vx: f1 * ex,
            vy: f1 * ey,
            vxx: f2 * ex * ex + f1 * exx,
            vyy: f2 * ey * ey + f1 * eyy,
        };
        if let Some(lr) = &self.log_rho {
            jet.v += lr.value.eval(&p)?;
            jet.vx += lr.x.eval(&p)?;
            jet.vy += lr.y.eval(&p)?;
            jet.vxx += lr.xx.eval(&p)?;
            jet.vyy += lr.yy.eval(&p)?;
        }
        Ok(jet)
    }

    fn is_singular(&self, x: f64, y: f64, margin: f64) -> bool {
        let p = Point::of(&[("x", x), ("y", y)]);
        let Ok(ev) = self.eta.eval(&p) else { return true };
        let (lo, hi) = self.traj.eta_range();
        let band = margin * (hi - lo);
        if ev < lo + band || ev > hi - band {
            return true;
        }
        match self.rho.eval(&p) {
            Ok(r) => r < GRAD_FLOOR,
            Err(_) => true,
        }
    }
}
