//! Acceptance suite: every guarantee the workspace makes, asserted at its
//! stated tolerance. Each check prints one `acceptance NN: PASS` line with
//! the measured numbers (visible under `--nocapture`); a failed assertion
//! fails the corresponding check.

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fastdiff_core::analytic::pair::{
    cauchy_riemann_residual, orthogonality_residual, LogGradLaplacian,
};
use fastdiff_core::catalog::{self, EquationTag, Family, LiouvilleKind};
use fastdiff_core::solver::{
    integrate_ode22, study_elliptic, study_fast1d, study_fast2d, AnsatzField, EllipticProblem,
    Fast2dProblem, OdeParams, Profile, TimeScheme,
};
use fastdiff_core::transform::{branch, conformal_lift, liouville_shift, reduce_via_harmonic};
use fastdiff_core::verify::{
    fast_diffusion_residual, lemma1_fd_residual, liouville_residual, quadratic_form_residual,
    reduced_residual, system22_residual, weighted_residual,
};
use fastdiff_core::{Domain, Expr, Field, HarmonicPair, SampleSpec};

fn spec_of(bounds: &[(&str, f64, f64)], count: usize, seed: u64) -> SampleSpec {
    SampleSpec::new(Domain::of(bounds).unwrap(), count, seed).unwrap()
}

fn plane_spec(rect: [f64; 4], count: usize, seed: u64) -> SampleSpec {
    spec_of(
        &[("x", rect[0], rect[1]), ("y", rect[2], rect[3])],
        count,
        seed,
    )
}

fn two_xy() -> Expr {
    Expr::constant(2.0) * Expr::var("x") * Expr::var("y")
}

fn x2_minus_y2() -> Expr {
    Expr::var("x").powi(2) - Expr::var("y").powi(2)
}

/// Conjugate-pair identities: Cauchy-Riemann residuals and the gradient
/// identities (orthogonality, equal magnitude) vanish to rounding for the
/// monomial pairs n = 1..6 and exponential pairs k = 1, 2, 3.
#[test]
fn a01_conjugate_pair_identities() {
    let t0 = Instant::now();
    let mut pairs = Vec::new();
    for n in 1..=6 {
        pairs.push(HarmonicPair::monomial(n).unwrap());
    }
    for k in [1.0, 2.0, 3.0] {
        pairs.push(HarmonicPair::exponential(k).unwrap());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0001);
    let mut worst = 0.0f64;
    for pair in &pairs {
        for _ in 0..100 {
            let x = rng.random_range(-1.2..1.2);
            let y = rng.random_range(-1.2..1.2);
            let (cr1, cr2) = cauchy_riemann_residual(pair, x, y).unwrap();
            let (dot, norm) = orthogonality_residual(pair, x, y).unwrap();
            for r in [cr1, cr2, dot, norm] {
                assert!(
                    r.abs() < 1e-10,
                    "{}: residual {r:.3e} at ({x}, {y})",
                    pair.descriptor()
                );
                worst = worst.max(r.abs());
            }
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 5.0, "took {dt:?}");
    println!(
        "acceptance 01 PASS: 9 pairs x 100 points, worst identity residual {worst:.3e} (< 1e-10) in {dt:?}"
    );
}

/// For random harmonic polynomials the log of the squared conjugate-gradient
/// magnitude is itself harmonic: |Δ ln |∇η|²| < 1e-7 wherever |∇η|² > 1e-2,
/// cross-checked against a nested finite-difference Laplacian.
#[test]
fn a02_log_gradient_laplacian_vanishes() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0002);
    let mut worst = 0.0f64;
    let mut evaluated = 0usize;
    let mut fd_checked = 0usize;
    let mut worst_fd_gap = 0.0f64;

    for _ in 0..10 {
        let mut terms = Vec::new();
        for k in 1..=6u32 {
            let p = HarmonicPair::monomial(k).unwrap();
            terms.push(Expr::constant(rng.random_range(-2.0..2.0)) * p.xi().clone());
            terms.push(Expr::constant(rng.random_range(-2.0..2.0)) * p.eta().clone());
        }
        let eta = Expr::add(terms);
        let oracle = LogGradLaplacian::new(&eta);

        // (x, y, rho, symbolic residual) at points above the gradient floor.
        let mut kept: Vec<(f64, f64, f64, f64)> = Vec::new();
        for _ in 0..200 {
            let x = rng.random_range(-1.0..1.0);
            let y = rng.random_range(-1.0..1.0);
            match oracle.residual_at(x, y, 1e-2) {
                Ok(r) => {
                    assert!(r.abs() < 1e-7, "residual {r:.3e} at ({x}, {y})");
                    worst = worst.max(r.abs());
                    evaluated += 1;
                    let rho = oracle.rho().eval(&fastdiff_core::Point::of(&[("x", x), ("y", y)])).unwrap();
                    kept.push((x, y, rho, r));
                }
                Err(fastdiff_core::Error::SkippedSample(_)) => {}
                Err(e) => panic!("unexpected error: {e}"),
            }
        }
        // FD cross-check where the gradient is comfortably large, so the
        // nested difference quotients are well conditioned.
        kept.sort_by(|a, b| b.2.total_cmp(&a.2));
        for &(x, y, rho, sym) in kept.iter().filter(|p| p.2 > 0.5).take(3) {
            let fd = lemma1_fd_residual(&eta, x, y, 1e-3, 1e-4).unwrap();
            let gap = (sym - fd).abs();
            assert!(gap < 1e-4, "fd gap {gap:.3e} at ({x}, {y}), rho {rho:.3e}");
            worst_fd_gap = worst_fd_gap.max(gap);
            fd_checked += 1;
        }
    }
    assert!(evaluated > 500, "only {evaluated} samples above the floor");
    assert!(fd_checked >= 10, "only {fd_checked} fd cross-checks ran");
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "took {dt:?}");
    println!(
        "acceptance 02 PASS: 10 polynomials, {evaluated} samples, worst |Δ ln ρ| {worst:.3e} (< 1e-7), {fd_checked} fd checks within {worst_fd_gap:.3e} (< 1e-4) in {dt:?}"
    );
}

/// Every shipped catalog entry passes the residual oracle for its tagged
/// equation at 1e-7 over 1000 seeded samples, and the exponential branched
/// entry's provenance records both the failing unit-exponent prefactor and
/// the validated exp(6x) one; the unit-exponent variant is rerun here as a
/// negative control.
#[test]
fn a03_catalog_entries_pass_their_oracles() {
    let t0 = Instant::now();
    let entries = catalog::standard_catalog();
    assert_eq!(entries.len(), 12);
    let mut worst = 0.0f64;
    for entry in &entries {
        let spec = SampleSpec::new(entry.default_domain.clone(), 1000, 0xACC0_0003).unwrap();
        let report = match &entry.tag {
            EquationTag::Fast2d => fast_diffusion_residual(&entry.field, &spec).unwrap(),
            EquationTag::Fast1d => reduced_residual(&entry.field, &spec).unwrap(),
            EquationTag::Weighted { weight } => {
                weighted_residual(&entry.field, weight, &spec).unwrap()
            }
            EquationTag::Liouville { lambda } => {
                liouville_residual(&entry.field, *lambda, None, &spec).unwrap()
            }
            EquationTag::LiouvilleInhomogeneous { lambda, source } => {
                liouville_residual(&entry.field, *lambda, Some(source), &spec).unwrap()
            }
            EquationTag::System22 { .. } => {
                panic!("no coupled-system entries ship in the standard catalog")
            }
        };
        assert!(
            report.max_rel < 1e-7,
            "{}: max_rel {:.3e}",
            entry.id,
            report.max_rel
        );
        assert!(report.n_evaluated >= 900, "{}: {} evaluated", entry.id, report.n_evaluated);
        worst = worst.max(report.max_rel);
    }

    let exp_entry = catalog::find("branched_exp").unwrap();
    assert!(exp_entry.provenance.contains("exp(x)"));
    assert!(exp_entry.provenance.contains("exp(6x)"));

    // Negative control: the unit-exponent prefactor variant of the same
    // field (value scaled by exp(-5x)) must fail the same oracle.
    let wrong = Field::new(
        exp_entry.field.value().clone()
            * Expr::neg(Expr::constant(5.0) * Expr::var("x")).exp(),
        &["x", "y", "t"],
        exp_entry.field.singular().clone(),
    )
    .unwrap();
    let spec = SampleSpec::new(exp_entry.default_domain.clone(), 500, 0xACC0_0003).unwrap();
    let bad = fast_diffusion_residual(&wrong, &spec).unwrap();
    assert!(bad.max_rel > 1e-3, "control too small: {:.3e}", bad.max_rel);

    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "took {dt:?}");
    println!(
        "acceptance 03 PASS: 12 entries x 1000 samples, worst max_rel {worst:.3e} (< 1e-7); unit-exponent prefactor control fails at {:.3e} (> 1e-3) in {dt:?}",
        bad.max_rel
    );
}

/// Branching the time-dependent seed through 20 random conjugate pairs
/// produces plane solutions (relative residual < 1e-7 at 200 points each),
/// and the identity pair reproduces the seed to 1e-12.
#[test]
fn a04_branching_produces_plane_solutions() {
    let t0 = Instant::now();
    let seed_entry = catalog::base_seed();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0004);

    let mut pairs = Vec::new();
    for n in 1..=6 {
        pairs.push(HarmonicPair::monomial(n).unwrap());
    }
    for i in 0..7 {
        pairs.push(HarmonicPair::exponential(0.5 + 0.3 * i as f64).unwrap());
    }
    for _ in 0..7 {
        let a = rng.random_range(0.6..1.6);
        let b = rng.random_range(0.6..1.6);
        let c1 = rng.random_range(0.5..1.0);
        let c2 = rng.random_range(0.5..1.0);
        pairs.push(HarmonicPair::affine(a, b, c1, c2).unwrap());
    }
    assert_eq!(pairs.len(), 20);

    let mut worst = 0.0f64;
    for (i, pair) in pairs.iter().enumerate() {
        let u = branch(pair, &seed_entry.field).unwrap();
        let spec = spec_of(
            &[("x", 0.35, 1.05), ("y", 0.35, 1.05), ("t", 0.3, 1.4)],
            200,
            0xACC0_0004 + i as u64,
        );
        let report = fast_diffusion_residual(&u, &spec).unwrap();
        assert!(
            report.max_rel < 1e-7,
            "{}: max_rel {:.3e}",
            pair.descriptor(),
            report.max_rel
        );
        assert!(report.n_evaluated >= 150, "{}: {} evaluated", pair.descriptor(), report.n_evaluated);
        worst = worst.max(report.max_rel);
    }

    // Identity pair: u(x, y, t) must equal the seed itself.
    let id = branch(&HarmonicPair::identity(), &seed_entry.field).unwrap();
    let mut worst_gap = 0.0f64;
    for _ in 0..20 {
        let x = rng.random_range(0.35..1.4);
        let y = rng.random_range(0.35..1.4);
        let t = rng.random_range(0.3..1.9);
        let got = id
            .eval(&fastdiff_core::Point::of(&[("x", x), ("y", y), ("t", t)]))
            .unwrap();
        let want = seed_entry
            .field
            .eval(&fastdiff_core::Point::of(&[("xi", x), ("eta", y), ("t", t)]))
            .unwrap();
        worst_gap = worst_gap.max((got - want).abs());
    }
    assert!(worst_gap <= 1e-12, "identity gap {worst_gap:.3e}");

    let dt = t0.elapsed();
    println!(
        "acceptance 04 PASS: 20 pairs x 200 points, worst max_rel {worst:.3e} (< 1e-7); identity reproduces seed within {worst_gap:.3e} (<= 1e-12) in {dt:?}"
    );
}

/// All four one-dimensional families solve the reduced equation (< 1e-9),
/// their reciprocals solve the quadratic form (< 1e-9), and composing each
/// family with the harmonic functions y, 2xy, 4(x³y − xy³) yields plane
/// solutions (< 1e-7).
#[test]
fn a05_reduction_along_harmonic_level_sets() {
    let t0 = Instant::now();
    let compose_pairs = [
        ("y", HarmonicPair::identity()),
        ("2xy", HarmonicPair::monomial(2).unwrap()),
        ("4(x^3 y - x y^3)", HarmonicPair::monomial(4).unwrap()),
    ];
    // Per family: parameters, march window for composed sampling, and one
    // plane box per harmonic function keeping the family's moving pole and
    // positivity constraints satisfied.
    let cases: [(Family, [f64; 3], (f64, f64), [[f64; 4]; 3]); 4] = [
        (
            Family::TrigSh,
            [1.0, 1.0, 1.0],
            (0.4, 1.2),
            [[0.3, 0.9, 0.3, 0.9], [0.3, 0.9, 0.3, 0.9], [0.3, 0.9, 0.3, 0.9]],
        ),
        (
            Family::TrigCos,
            [1.0, 1.0, 1.0],
            (1.9, 2.6),
            [[0.3, 0.9, 3.4, 4.0], [1.35, 1.55, 1.25, 1.4], [1.38, 1.46, 0.33, 0.37]],
        ),
        (
            Family::HypCos,
            [2.0, 1.0, 1.0],
            (0.3, 1.1),
            [[0.3, 0.9, 0.3, 0.9], [0.3, 0.9, 0.3, 0.9], [0.3, 0.9, 0.3, 0.9]],
        ),
        (
            Family::HypSh,
            [2.0, 1.0, 1.0],
            (0.5, 1.0),
            [[0.3, 0.9, 0.7, 1.5], [0.6, 1.1, 0.6, 1.1], [1.0, 1.3, 0.3, 0.5]],
        ),
    ];

    let mut worst_reduced = 0.0f64;
    let mut worst_quad = 0.0f64;
    let mut worst_plane = 0.0f64;
    for (family, [k1, k2, lambda], t_range, boxes) in &cases {
        let entry = catalog::one_dim_family(*family, *k1, *k2, *lambda).unwrap();
        let spec = SampleSpec::new(entry.default_domain.clone(), 500, 0xACC0_0005).unwrap();
        let report = reduced_residual(&entry.field, &spec).unwrap();
        assert!(report.max_rel < 1e-9, "{}: {:.3e}", entry.id, report.max_rel);
        worst_reduced = worst_reduced.max(report.max_rel);

        let quad = quadratic_form_residual(&entry.field, &spec).unwrap();
        assert!(quad.max_rel < 1e-9, "{} reciprocal: {:.3e}", entry.id, quad.max_rel);
        worst_quad = worst_quad.max(quad.max_rel);

        for ((label, pair), rect) in compose_pairs.iter().zip(boxes) {
            let u = reduce_via_harmonic(pair, &entry.field).unwrap();
            let spec = spec_of(
                &[
                    ("x", rect[0], rect[1]),
                    ("y", rect[2], rect[3]),
                    ("t", t_range.0, t_range.1),
                ],
                250,
                0xACC0_0005,
            );
            let report = fast_diffusion_residual(&u, &spec).unwrap();
            assert!(
                report.max_rel < 1e-7,
                "{} via {label}: {:.3e}",
                entry.id,
                report.max_rel
            );
            assert!(report.n_evaluated >= 200);
            worst_plane = worst_plane.max(report.max_rel);
        }
    }
    let dt = t0.elapsed();
    println!(
        "acceptance 05 PASS: 4 families: reduced {worst_reduced:.3e} (< 1e-9), reciprocal quadratic form {worst_quad:.3e} (< 1e-9), 12 harmonic compositions {worst_plane:.3e} (< 1e-7) in {dt:?}"
    );
}

/// The conformal lift with f = exp(x² − y²) solves the weighted equation
/// (< 1e-7); the same field fails under a wrong weight and under the
/// unweighted oracle (> 1e-3).
#[test]
fn a06_conformal_lift_solves_weighted_equation() {
    let t0 = Instant::now();
    let f = x2_minus_y2().exp();
    let reduced = catalog::one_dim_family(Family::TrigSh, 1.0, 0.0, 1.0).unwrap();
    let lifted = conformal_lift(&f, &reduced.field).unwrap();

    let spec = spec_of(
        &[("x", 0.3, 1.0), ("y", 0.3, 1.0), ("t", 0.3, 1.2)],
        500,
        0xACC0_0006,
    );
    let good = weighted_residual(&lifted, &f, &spec).unwrap();
    assert!(good.max_rel < 1e-7, "lift residual {:.3e}", good.max_rel);

    // Wrong weight (still log-harmonic, so it reaches the sweep) and the
    // unweighted oracle must both reject the lifted field.
    let wrong_weight = weighted_residual(&lifted, &Expr::var("x").exp(), &spec).unwrap();
    assert!(wrong_weight.max_rel > 1e-3, "wrong weight {:.3e}", wrong_weight.max_rel);
    let unweighted = fast_diffusion_residual(&lifted, &spec).unwrap();
    assert!(unweighted.max_rel > 1e-3, "unweighted {:.3e}", unweighted.max_rel);

    let dt = t0.elapsed();
    println!(
        "acceptance 06 PASS: weighted residual {:.3e} (< 1e-7); wrong-weight control {:.3e}, unweighted control {:.3e} (both > 1e-3) in {dt:?}",
        good.max_rel, wrong_weight.max_rel, unweighted.max_rel
    );
}

/// Steady catalogue: both closed-form solution kinds of Δw = exp(λw) across
/// three harmonic arguments and two (A, λ) settings, the inhomogeneous
/// Δw = η·exp(λw) solutions, and invariance of residuals under the
/// conjugate-pair shift.
#[test]
fn a07_liouville_solutions_and_shift() {
    let t0 = Instant::now();
    let etas: [(&str, fn() -> Expr, [f64; 4]); 3] = [
        ("y", || Expr::var("y"), [-1.0, 1.0, -1.2, 1.2]),
        ("2xy", two_xy, [0.3, 0.8, 0.3, 0.8]),
        ("x^2 - y^2", x2_minus_y2, [0.35, 0.95, 0.05, 0.30]),
    ];
    let mut worst = 0.0f64;
    for (kind, settings) in [
        (LiouvilleKind::Sec, [(1.0, 1.0), (0.5, 2.0)]),
        (LiouvilleKind::Sech, [(1.0, -1.0), (0.5, -2.0)]),
    ] {
        for (a, lambda) in settings {
            for (label, eta, rect) in &etas {
                let entry = catalog::liouville_solutions(a, lambda, eta(), kind).unwrap();
                let spec = plane_spec(*rect, 250, 0xACC0_0007);
                let report = liouville_residual(&entry.field, lambda, None, &spec).unwrap();
                assert!(
                    report.max_rel < 1e-7,
                    "{:?} A={a} lambda={lambda} eta={label}: {:.3e}",
                    kind,
                    report.max_rel
                );
                worst = worst.max(report.max_rel);
            }
        }
    }

    // Inhomogeneous solutions, on boxes where lambda * eta > 0.
    let mut worst_inhom = 0.0f64;
    for (eta, rect) in [
        (two_xy(), [0.35, 1.4, 0.35, 1.4]),
        (x2_minus_y2(), [0.8, 1.5, 0.1, 0.5]),
    ] {
        let entry = catalog::liouville_inhomogeneous_solution(1.0, eta.clone()).unwrap();
        let spec = plane_spec(rect, 250, 0xACC0_0007);
        let report = liouville_residual(&entry.field, 1.0, Some(&eta), &spec).unwrap();
        assert!(report.max_rel < 1e-7, "inhomogeneous: {:.3e}", report.max_rel);
        worst_inhom = worst_inhom.max(report.max_rel);
    }

    // Shifting a verified solution through a conjugate pair preserves the
    // equation: w∘pair + (1/λ) ln |∇η|² still satisfies it.
    let base = catalog::liouville_solutions(1.0, -1.0, Expr::var("y"), LiouvilleKind::Sech).unwrap();
    let mut worst_shift = 0.0f64;
    for (pair, rect) in [
        (HarmonicPair::monomial(2).unwrap(), [0.4, 1.2, 0.4, 1.2]),
        (HarmonicPair::exponential(1.0).unwrap(), [-0.5, 0.5, -0.5, 0.5]),
    ] {
        let shifted = liouville_shift(&base.field, &pair, -1.0).unwrap();
        let spec = plane_spec(rect, 250, 0xACC0_0007);
        let report = liouville_residual(&shifted, -1.0, None, &spec).unwrap();
        assert!(
            report.max_rel < 1e-7,
            "shift via {}: {:.3e}",
            pair.descriptor(),
            report.max_rel
        );
        worst_shift = worst_shift.max(report.max_rel);
    }

    let dt = t0.elapsed();
    println!(
        "acceptance 07 PASS: 12 steady solutions {worst:.3e}, 2 inhomogeneous {worst_inhom:.3e}, 2 shifts {worst_shift:.3e} (all < 1e-7) in {dt:?}"
    );
}

/// Reference solvers converge at second order against exact solutions:
/// the 1D march on 65/129/257 nodes, the 2D march on 32²/64², and the
/// elliptic Newton solver on 33²/65² (tolerance 1e-10, at most 8 steps).
#[test]
fn a08_solver_convergence_orders() {
    let t0 = Instant::now();

    let family = catalog::one_dim_family(Family::TrigSh, 1.0, 0.0, 1.0).unwrap();
    let one_d = study_fast1d(
        &family.field,
        (-1.0, 1.0),
        &[65, 129, 257],
        0.5,
        1.0,
        0.5,
        TimeScheme::CrankNicolson,
    )
    .unwrap();
    for p in &one_d.orders {
        assert!((1.7..=2.3).contains(p), "1d orders {:?}", one_d.orders);
    }
    let finest_1d = *one_d.errors.last().unwrap();
    assert!(finest_1d < 1e-4, "1d finest error {finest_1d:.3e}");

    let plane = catalog::find("branched_tan_tanh").unwrap();
    let two_d = study_fast2d(
        &Fast2dProblem {
            reference: &plane.field,
            weight: None,
            sink: 0.0,
            rect: [0.3, 0.9, 0.3, 0.9],
        },
        &[32, 64],
        0.5,
        1.0,
        0.25,
    )
    .unwrap();
    for p in &two_d.orders {
        assert!((1.7..=2.3).contains(p), "2d orders {:?}", two_d.orders);
    }
    let finest_2d = *two_d.errors.last().unwrap();
    assert!(finest_2d < 5e-4, "2d finest error {finest_2d:.3e}");

    let steady = catalog::find("liouville_sec").unwrap();
    let lambda = match steady.tag {
        EquationTag::Liouville { lambda } => lambda,
        ref other => panic!("unexpected tag {other:?}"),
    };
    let elliptic = study_elliptic(
        &EllipticProblem {
            reference: &steady.field,
            lambda,
            source: None,
            rect: [0.3, 0.8, 0.3, 0.8],
        },
        &[33, 65],
        1e-10,
        8,
    )
    .unwrap();
    for p in &elliptic.orders {
        assert!((1.7..=2.3).contains(p), "elliptic orders {:?}", elliptic.orders);
    }
    assert!(elliptic.max_newton_iters <= 8, "newton {}", elliptic.max_newton_iters);

    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 180.0, "took {dt:?}");
    println!(
        "acceptance 08 PASS: 1d orders {:?} err {finest_1d:.3e}; 2d orders {:?} err {finest_2d:.3e}; elliptic orders {:?} newton <= {} in {dt:?}",
        one_d.orders, two_d.orders, elliptic.orders, elliptic.max_newton_iters
    );
}

/// Integrated ODE profiles substituted into the coupled elliptic system
/// leave residuals < 1e-6 in all three components; with equal first two
/// profiles and opposite quadratic couplings the third profile stays affine;
/// both candidate closure forms for the profile curvature are measured and
/// reported without asserting either.
#[test]
fn a09_coupled_system_trajectories() {
    let t0 = Instant::now();
    let (a, b) = (0.7, 0.4);
    let traj = Arc::new(
        integrate_ode22(&OdeParams {
            a,
            b,
            initial: [0.2, -0.3, -0.4, 0.25, 0.1, 0.6],
            eta0: 0.25,
            eta1: 2.1,
            steps: 1024,
        })
        .unwrap(),
    );
    let eta = two_xy();
    let u = AnsatzField::new(Profile::F, Arc::clone(&traj), &eta).unwrap();
    let v = AnsatzField::new(Profile::Psi, Arc::clone(&traj), &eta).unwrap();
    let phi = AnsatzField::new(Profile::Phi, Arc::clone(&traj), &eta).unwrap();

    let spec = plane_spec([0.4, 1.0, 0.4, 1.0], 300, 0xACC0_0009);
    let reports = system22_residual(&u, &v, &phi, a, b, &spec).unwrap();
    assert_eq!(reports.len(), 3);
    let mut worst = 0.0f64;
    for r in &reports {
        assert!(r.max_rel < 1e-6, "{}: rel {:.3e}", r.equation, r.max_rel);
        assert!(r.max_abs < 1e-6, "{}: abs {:.3e}", r.equation, r.max_abs);
        assert_eq!(r.n_evaluated, 300);
        worst = worst.max(r.max_rel.max(r.max_abs));
    }

    // Equal (F, F') and (Ψ, Ψ') starts with opposite couplings force the
    // third equation's right side to cancel bitwise, so φ stays affine.
    let matched = integrate_ode22(&OdeParams {
        a: 0.7,
        b: -0.7,
        initial: [0.2, -0.3, 0.2, -0.3, 0.1, 0.5],
        eta0: 0.25,
        eta1: 2.1,
        steps: 512,
    })
    .unwrap();
    let phi_curv = matched.max_abs_phi_second();
    assert!(phi_curv < 1e-10, "phi curvature {phi_curv:.3e}");

    // Measured outcome of the two closure candidates for the profile
    // curvature on the affine-φ run, reported but not asserted: the
    // exponential form tracks the integration, the linear form does not.
    let (lo, hi) = matched.eta_range();
    let (mut dev_exp, mut dev_lin) = (0.0f64, 0.0f64);
    for i in 0..40 {
        let s = lo + (i as f64 + 0.5) * (hi - lo) / 40.0;
        let (f, _, f2) = matched.eval(Profile::F, s).unwrap();
        let (_, p1, _) = matched.eval(Profile::Phi, s).unwrap();
        dev_exp = dev_exp.max((f2 - (f.exp() + 0.7 * p1 * p1)).abs());
        dev_lin = dev_lin.max((f2 - (f + 0.7)).abs());
    }

    let dt = t0.elapsed();
    println!(
        "acceptance 09 PASS: 3 components worst residual {worst:.3e} (< 1e-6); affine-φ curvature {phi_curv:.3e} (< 1e-10); curvature closure: exponential form deviates {dev_exp:.3e}, linear form deviates {dev_lin:.3e} (documented, not asserted) in {dt:?}"
    );
}

/// Rebuilding a field and rerunning its oracle with the same seed yields
/// byte-identical serialized reports.
#[test]
fn a10_seeded_reports_are_byte_identical() {
    let t0 = Instant::now();
    let one_d = || {
        let entry = catalog::one_dim_family(Family::TrigSh, 1.0, 1.0, 1.0).unwrap();
        let spec = SampleSpec::new(entry.default_domain.clone(), 400, 0xD5EED).unwrap();
        serde_json::to_string(&reduced_residual(&entry.field, &spec).unwrap()).unwrap()
    };
    let two_d = || {
        let seed = catalog::base_seed();
        let u = branch(&HarmonicPair::monomial(3).unwrap(), &seed.field).unwrap();
        let spec = spec_of(
            &[("x", 0.35, 1.05), ("y", 0.35, 1.05), ("t", 0.3, 1.4)],
            300,
            0xD5EED,
        );
        serde_json::to_string(&fast_diffusion_residual(&u, &spec).unwrap()).unwrap()
    };
    let (a1, a2) = (one_d(), one_d());
    assert_eq!(a1, a2, "one-dimensional report not reproducible");
    let (b1, b2) = (two_d(), two_d());
    assert_eq!(b1, b2, "plane report not reproducible");

    let dt = t0.elapsed();
    println!(
        "acceptance 10 PASS: repeated seeded runs serialize to byte-identical JSON ({} and {} bytes) in {dt:?}",
        a1.len(),
        b1.len()
    );
}
