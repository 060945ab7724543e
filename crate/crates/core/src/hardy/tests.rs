use super::*;
use crate::setmodel::{build_set, SetHandle, SetSpec};
use crate::Error;
use std::f64::consts::PI;

fn h(spec: SetSpec) -> SetHandle {
    build_set(&spec, 1 << 12, 0).unwrap()
}

fn origin(n: usize) -> SetHandle {
    h(SetSpec::points(vec![vec![0.0; n]]))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn exponent_examples() {
    let d = exponent_algebra(&HardyParams::new(4, 2.0, 3.0, 0.0));
    assert_eq!(d.p_star, 4.0);
    assert!((d.alpha.unwrap() - 2.0).abs() < 1e-12 && (d.alpha_prime.unwrap() - 2.0).abs() < 1e-12);
    assert!(d.identity_residual.unwrap() < 1e-12);
    let d = exponent_algebra(&HardyParams::new(4, 2.0, 4.0, 0.0));
    assert!((d.q_hat - 4.0 / 3.0).abs() < 1e-12 && d.beta_hat.abs() < 1e-12);
    assert!(d.alpha.is_none());
    let d = exponent_algebra(&HardyParams::new(3, 2.0, 2.0, 0.0));
    assert!((d.extra_bound - 1.0).abs() < 1e-12);
    assert!(d.alpha_prime.is_none());
    assert!((d.thin_threshold - 1.0).abs() < 1e-12);
}

#[test]
fn interpolation_examples() {
    let params = HardyParams::new(4, 2.0, 3.0, 0.0);
    assert!((interpolation_bound(2.0, 1.0, &params).unwrap() - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
    assert!((interpolation_bound(1.0, 1.0, &params).unwrap() - 1.0).abs() < 1e-12);
    let sweep: Vec<f64> = (1..20)
        .map(|k| interpolation_bound(k as f64 * 0.3, 1.5, &HardyParams::new(4, 2.0, 3.0, 0.7)).unwrap())
        .collect();
    assert!(sweep.windows(2).all(|w| w[1] >= w[0]));
    assert!(matches!(
        interpolation_bound(1.0, 1.0, &HardyParams::new(3, 2.0, 2.0, 0.0)),
        Err(Error::DegenerateExponent(_))
    ));
}

#[test]
fn radial_quadrature_closed_forms() {
    // ∫_0^1 t^{-1/2} dt = 2, ∫_0^1 ln t dt = -1.
    let q = integrate_1d(&|t: f64| t.powf(-0.5), 0.0, 1.0, &[], &[0.0]).unwrap();
    assert!((q.value - 2.0).abs() < 1e-9, "{}", q.value);
    let q = integrate_1d(&|t: f64| t.ln(), 0.0, 1.0, &[], &[0.0]).unwrap();
    assert!((q.value + 1.0).abs() < 1e-9, "{}", q.value);
    assert!(matches!(integrate_1d(&|t: f64| 1.0 / t, 0.0, 1.0, &[], &[0.0]), Err(Error::Divergent(_))));
}

#[test]
fn tent_ratio_is_one_around_a_point() {
    let set = origin(3);
    let f = family_tent(&[0.0; 3], 1.0).unwrap();
    let params = HardyParams::new(3, 2.0, 2.0, 0.0);
    let v = evaluate_functional(&f, &set, &params, &EvalConfig::default()).unwrap();
    assert_eq!(v.method, EvalMethod::Radial);
    assert!(rel(v.lhs, 4.0 * PI / 3.0) < 1e-8 && rel(v.rhs, 4.0 * PI / 3.0) < 1e-8);
    assert!((v.ratio.unwrap() - 1.0).abs() < 1e-8);
    let cfg = EvalConfig { method: EvalMethod::Grid, resolution: 32, max_subdiv: 5 };
    let g = evaluate_functional(&f, &set, &params, &cfg).unwrap();
    assert!((g.ratio.unwrap() - 1.0).abs() < 0.03, "{:?}", g);
}

#[test]
fn zero_function_has_no_ratio() {
    let f = family_tent(&[0.0; 3], 1.0).unwrap().scaled(0.0);
    let v = evaluate_functional(&f, &origin(3), &HardyParams::new(3, 2.0, 2.0, 0.0), &EvalConfig::default()).unwrap();
    assert_eq!((v.lhs, v.rhs, v.ratio), (0.0, 0.0, None));
}

#[test]
fn ratio_is_homogeneous() {
    let set = h(SetSpec::subspace_axes(vec![0], 3));
    let params = HardyParams::new(3, 2.0, 3.0, 0.0);
    let cfg = EvalConfig { resolution: 16, max_subdiv: 2, method: EvalMethod::Auto };
    let f = family_bump(&[1.0, 0.0, 0.0], 0.25).unwrap();
    let a = evaluate_functional(&f, &set, &params, &cfg).unwrap().ratio.unwrap();
    let b = evaluate_functional(&f.clone().scaled(2.0), &set, &params, &cfg).unwrap().ratio.unwrap();
    assert!(rel(a, b) < 1e-10);
    // A bump away from a plane, evaluated on the grid.
    let plane = h(SetSpec::subspace_axes(vec![1, 2], 3));
    let g = family_bump(&[1.0, 0.0, 0.0], 0.2).unwrap();
    let a = evaluate_functional(&g, &plane, &params, &cfg).unwrap();
    let b = evaluate_functional(&g.clone().scaled(3.0), &plane, &params, &cfg).unwrap();
    assert_eq!(a.method, EvalMethod::Grid);
    assert!(a.ratio.unwrap().is_finite() && rel(a.ratio.unwrap(), b.ratio.unwrap()) < 1e-10);
}

#[test]
fn line_is_too_thin_at_p_equal_q() {
    let set = h(SetSpec::subspace(1, 3));
    let f = family_bump(&[0.0; 3], 0.5).unwrap();
    let r = evaluate_functional(&f, &set, &HardyParams::new(3, 2.0, 2.0, 0.0), &EvalConfig::default());
    assert!(matches!(r, Err(Error::Divergent(_))));
}

#[test]
fn bump_lower_bound_around_a_point() {
    // lhs ≥ ∫_{B(0,r)} |x|^{-2} = 4πr.
    let set = origin(3);
    let params = HardyParams::new(3, 2.0, 2.0, 0.0);
    for r in [0.25, 1.0] {
        let f = family_bump(&[0.0; 3], r).unwrap();
        let v = evaluate_functional(&f, &set, &params, &EvalConfig::default()).unwrap();
        assert!(v.lhs >= 4.0 * PI * r);
        // Gradient cap: ∫|∇f|² ≤ (2/r)²·vol(B(0,2r)).
        assert!(v.rhs <= (2.0 / r).powi(2) * 4.0 / 3.0 * PI * (2.0 * r).powi(3));
    }
    let f = family_bump(&[0.0; 3], 1.0).unwrap();
    assert_eq!(f.value(&[0.0; 3]), 1.0);
    assert_eq!(f.value(&[2.1, 0.0, 0.0]), 0.0);
}

#[test]
fn sphere_fj_shell() {
    let f = family_sphere_fj(2, 3, None).unwrap();
    assert_eq!(f.value(&[0.4, 0.0, 0.0]), 1.0);
    assert_eq!(f.value(&[0.76, 0.0, 0.0]), 0.0);
    assert!((f.grad_norm(&[0.6, 0.0, 0.0]) - 4.0).abs() < 1e-12);
    assert!(matches!(family_sphere_fj(5, 3, Some(128)), Err(Error::ResolutionTooCoarse(_))));
    assert!(family_sphere_fj(3, 3, Some(128)).is_ok());
}

#[test]
fn sphere_fj_growth() {
    let set = h(SetSpec::sphere(vec![0.0; 3], 1.0));
    let params = HardyParams::new(3, 2.0, 2.0, 2.0);
    let vals: Vec<SideValues> = (2..=8)
        .map(|j| {
            evaluate_functional(&family_sphere_fj(j, 3, None).unwrap(), &set, &params, &EvalConfig::default()).unwrap()
        })
        .collect();
    for w in vals.windows(2).skip(1) {
        let rhs = w[1].rhs / w[0].rhs;
        let kappa = w[1].ratio.unwrap() / w[0].ratio.unwrap();
        assert!((0.3..=0.8).contains(&rhs), "{rhs}");
        assert!((1.2..=1.7).contains(&kappa), "{kappa}");
        assert!(w[1].lhs >= w[0].lhs);
    }
}

#[test]
fn line_bumps_are_scale_invariant_above_threshold() {
    let set = h(SetSpec::subspace(1, 3));
    let params = HardyParams::new(3, 2.0, 3.0, 0.0);
    let ks: Vec<f64> = (2..=6)
        .map(|k| {
            let f = family_bump(&[0.0; 3], 2f64.powi(-k)).unwrap();
            evaluate_functional(&f, &set, &params, &EvalConfig::default()).unwrap().ratio.unwrap()
        })
        .collect();
    for w in ks.windows(2) {
        assert!(rel(w[0], w[1]) < 1e-6, "{ks:?}");
    }
}

#[test]
fn axis_power_grows_at_the_critical_exponent() {
    let set = h(SetSpec::subspace(1, 3));
    let params = HardyParams::new(3, 2.0, 2.0, 0.0);
    let ks: Vec<f64> = (1..=6)
        .map(|k| {
            let f = family_axis_power(3, 0, 2f64.powi(-k), 1.0, 1.0).unwrap();
            let v = evaluate_functional(&f, &set, &params, &EvalConfig::default()).unwrap();
            assert_eq!(v.method, EvalMethod::Axisymmetric);
            v.ratio.unwrap()
        })
        .collect();
    assert!(ks.windows(2).all(|w| w[1] > w[0]), "{ks:?}");
}

#[test]
fn holder_residual_nonpositive() {
    let params = HardyParams::new(4, 2.0, 3.0, 0.0);
    let set = origin(4);
    for f in [family_tent(&[0.0; 4], 1.0).unwrap(), family_bump(&[0.0; 4], 0.5).unwrap()] {
        let r = holder_step_check(&f, &set, &params, &EvalConfig::default()).unwrap();
        assert_eq!(r.method, EvalMethod::Radial);
        assert!(r.relative <= 0.02, "{r:?}");
    }
    let far = family_bump(&[2.0, 0.0, 0.0, 0.0], 0.25).unwrap();
    let cfg = EvalConfig { resolution: 12, max_subdiv: 2, method: EvalMethod::Auto };
    let r = holder_step_check(&far, &set, &params, &cfg).unwrap();
    assert!(r.relative <= 0.02, "{r:?}");
    let zero = family_tent(&[0.0; 4], 1.0).unwrap().scaled(0.0);
    assert_eq!(holder_step_check(&zero, &set, &params, &EvalConfig::default()).unwrap().residual, 0.0);
}

#[test]
fn family_sweep_reaches_classical_hardy_constant() {
    let est = estimate_constant(&origin(3), &HardyParams::new(3, 2.0, 2.0, 0.0), Strategy::FamilySweep, 64, 0).unwrap();
    assert!(est.kappa().powi(2) >= 3.2 && est.kappa().powi(2) <= 4.0, "{}", est.kappa());
    assert_eq!(est.best.method, EvalMethod::Radial);
}

#[test]
fn family_sweep_is_monotone_in_budget() {
    let set = origin(3);
    let params = HardyParams::new(3, 2.0, 2.5, 0.5);
    let ks: Vec<f64> = [1, 3, 6, 12, 24]
        .iter()
        .map(|&b| estimate_constant(&set, &params, Strategy::FamilySweep, b, 0).unwrap().kappa())
        .collect();
    assert!(ks.windows(2).all(|w| w[1] >= w[0]), "{ks:?}");
}

#[test]
fn family_sweep_follows_sphere_cutoffs() {
    let set = h(SetSpec::sphere(vec![0.0; 3], 1.0));
    let params = HardyParams::new(3, 2.0, 2.0, 2.0);
    let est = estimate_constant(&set, &params, Strategy::FamilySweep, 9, 0).unwrap();
    assert_eq!(est.trace.len(), 9);
    assert!(est.trace.windows(2).skip(1).all(|w| w[1].kappa > w[0].kappa));
    assert!(est.best.label.contains("j=10"));
}

fn small_problem() -> (SetHandle, HardyParams, DiscreteProblem) {
    let set = origin(2);
    let params = HardyParams::new(2, 1.5, 2.0, 0.5);
    let prob = DiscreteProblem::new(&set, &params, &crate::geom::Bounds::cube(&[0.0, 0.0], 1.0), 6).unwrap();
    (set, params, prob)
}

#[test]
fn discrete_ratio_of_a_single_cell() {
    let (_, _, prob) = small_problem();
    let mut u = vec![0.0; prob.cells()];
    u[0] = 1.0;
    // Cell (0,0) has center (-1+h/2, -1+h/2); its gradient lives on itself and the two
    // ghost cells below and to the left, each with one unit difference.
    let h = prob.h;
    let c = -1.0 + 0.5 * h;
    let d0 = (2.0 * c * c).sqrt();
    let lhs = h * h * d0.powf(HardyParams::new(2, 1.5, 2.0, 0.5).lhs_weight());
    let dl = ((c - h).powi(2) + c * c).sqrt();
    let rhs = h * h * (d0.sqrt() * 2f64.powf(0.75) + 2.0 * dl.sqrt()) * h.powf(-1.5);
    let (l, r) = prob.sides(&u);
    assert!(rel(l, lhs) < 1e-12 && rel(r, rhs) < 1e-12, "{l} {lhs} {r} {rhs}");
}

#[test]
fn ascent_keeps_sign_and_improves() {
    let (set, params, prob) = small_problem();
    let u0 = vec![1.0; prob.cells()];
    let (u, trace) = prob.ascend(&u0, 50);
    assert!(u.iter().all(|v| *v >= 0.0));
    assert!(prob.ratio(&u).unwrap() >= prob.ratio(&u0).unwrap());
    assert!(trace.iter().all(|t| (t.rhs - 1.0).abs() < 1e-9));
    assert!(trace.windows(2).all(|w| w[1].kappa >= w[0].kappa));
    let cfg = OptimizeConfig { grid: 6, bounds: Some(prob.bounds.clone()), ..Default::default() };
    let ks: Vec<f64> = [1, 2, 5, 20]
        .iter()
        .map(|&b| estimate_constant_with(&set, &params, Strategy::GridAscent, b, 3, &cfg).unwrap().kappa())
        .collect();
    assert!(ks.windows(2).all(|w| w[1] >= w[0]), "{ks:?}");
}

#[test]
fn ascent_matches_generalized_eigenvalue() {
    use nalgebra::DMatrix;
    // p = q = 2: the discrete maximum is the top eigenvalue of B^{-1/2} A B^{-1/2}.
    let set = h(SetSpec::points(vec![vec![0.05, 0.1]]));
    let params = HardyParams::new(2, 2.0, 2.0, 0.3);
    let bounds = crate::geom::Bounds::cube(&[0.0, 0.0], 1.0);
    let prob = DiscreteProblem::new(&set, &params, &bounds, 5).unwrap();
    let k = prob.cells();
    let unit = |i: usize| {
        let mut u = vec![0.0; k];
        u[i] = 1.0;
        u
    };
    let a = DMatrix::from_fn(k, k, |i, j| if i == j { prob.sides(&unit(i)).0 } else { 0.0 });
    // Quadratic form by polarization.
    let b = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            prob.sides(&unit(i)).1
        } else {
            let mut u = unit(i);
            u[j] = 1.0;
            let mut v = unit(i);
            v[j] = -1.0;
            0.25 * (prob.sides(&u).1 - prob.sides(&v).1)
        }
    });
    let chol = b.cholesky().unwrap();
    let l_inv = chol.l().try_inverse().unwrap();
    let m = &l_inv * a * l_inv.transpose();
    let lam = m.symmetric_eigen().eigenvalues.max();
    let cfg = OptimizeConfig { grid: 5, bounds: Some(bounds), ..Default::default() };
    let est = estimate_constant_with(&set, &params, Strategy::GridAscent, 400, 0, &cfg).unwrap();
    assert!(rel(est.kappa(), lam.sqrt()) < 1e-3, "{} vs {}", est.kappa(), lam.sqrt());
}

#[test]
fn radial_power_closed_form() {
    // f = t^{-1/2} on [ε, 1], constant inside, linear cutoff on [1, 2]:
    // lhs = 4π(1 + L + 1/3), rhs = 4π(L/4 + 7/3), L = ln(1/ε).
    let eps = 2f64.powi(-80);
    let f = family_radial_power(&[0.0; 3], 0.5, eps, 1.0).unwrap();
    let v = evaluate_functional(&f, &origin(3), &HardyParams::new(3, 2.0, 2.0, 0.0), &EvalConfig::default()).unwrap();
    let l = -eps.ln();
    assert!(rel(v.lhs, 4.0 * PI * (4.0 / 3.0 + l)) < 1e-8, "{}", v.lhs);
    assert!(rel(v.rhs, 4.0 * PI * (l / 4.0 + 7.0 / 3.0)) < 1e-8, "{}", v.rhs);
}
