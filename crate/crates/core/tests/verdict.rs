use fhl::hardy::{family_sphere_fj, family_tent, EvalConfig, HardyParams};
use fhl::setmodel::{build_set, SetSpec};
use fhl::verdict::*;

fn dims(upper: f64, lower: f64, mink: f64, hausdorff: Option<f64>) -> DimInputs {
    DimInputs {
        assouad_upper: Some(upper),
        assouad_lower: Some(lower),
        minkowski_lower: Some(mink),
        hausdorff,
        ..Default::default()
    }
}

const COMPACT: SetFlags = SetFlags { porous: true, compact: true, complement_unbounded: false };
const UNBOUNDED: SetFlags = SetFlags { porous: true, compact: false, complement_unbounded: true };

#[test]
fn cantor_holds_by_thin_rule() {
    let v = predict(&HardyParams::new(3, 2.0, 2.0, 0.0), &dims(0.63, 0.63, 0.63, None), &COMPACT);
    assert_eq!(v.prediction, Prediction::Holds);
    assert!(v.rule.starts_with("R1"));
    assert!(!v.conflict);
    assert!(v.comparisons.iter().all(|c| c.tol == DEFAULT_TOL));
}

#[test]
fn tiled_reciprocals_fail_by_dichotomy() {
    let v = predict(&HardyParams::new(3, 2.5, 2.5, 0.0), &dims(1.0, 0.0, 0.0, Some(0.0)), &UNBOUNDED);
    assert_eq!(v.prediction, Prediction::Fails);
    assert!(v.rule.starts_with("R5"), "{}", v.rule);
    // The exact Hausdorff value is compared without margin.
    assert!(v.comparisons.iter().any(|c| c.quantity.starts_with("dim_H") && c.tol == 0.0));
}

#[test]
fn compact_thick_sets_are_not_covered_by_the_thick_rule() {
    // The thick rule needs E unbounded; the compact sphere only meets the global failure.
    let p = HardyParams::new(3, 2.0, 2.0, 0.0);
    let v = predict(&p, &dims(2.0, 2.0, 2.0, Some(2.0)), &COMPACT);
    assert!(!v.fired.iter().any(|r| r.starts_with("R3")));
    assert_eq!(v.prediction, Prediction::Fails);
    assert!(v.rule.starts_with("R7"));
    // The unbounded plane passes the thick rule; the global failure is no conflict.
    let v = predict(&p, &dims(2.0, 2.0, 2.0, Some(2.0)), &UNBOUNDED);
    assert_eq!(v.prediction, Prediction::Holds);
    assert!(v.rule.starts_with("R3"));
    assert!(!v.conflict);
    assert!(v.caveats.iter().any(|c| c.contains("R7 fails")));
}

#[test]
fn margins_give_unknown() {
    let v = predict(&HardyParams::new(3, 2.0, 2.0, 0.0), &dims(1.0, 1.0, 1.0, Some(1.0)), &UNBOUNDED);
    assert_eq!(v.prediction, Prediction::Unknown);
    assert!(v.rule.is_empty());
    assert!(v.comparisons.iter().any(|c| c.outcome == Tri::Margin));
    // Exact equality is undecided even with zero tolerance.
    let exact = DimInputs { tol: 0.0, ..dims(1.0, 1.0, 1.0, Some(1.0)) };
    assert_eq!(predict(&HardyParams::new(3, 2.0, 2.0, 0.0), &exact, &UNBOUNDED).prediction, Prediction::Unknown);
}

#[test]
fn out_of_range_parameters_give_unknown() {
    for p in
        [HardyParams::new(3, 3.0, 3.0, 0.0), HardyParams::new(3, 2.0, 1.5, 0.0), HardyParams::new(3, 2.0, 7.0, 0.0)]
    {
        let v = predict(&p, &dims(0.0, 0.0, 0.0, Some(0.0)), &COMPACT);
        assert_eq!(v.prediction, Prediction::Unknown, "{p:?}");
        assert!(!v.caveats.is_empty());
    }
}

#[test]
fn global_rule_flips_once_along_a_sweep() {
    // Line in ℝ³, β = 0, q = p: the threshold (q/p)(n−p) = 3−p crosses dim_A = 1 at p = 2.
    let mut seen = Vec::new();
    for i in 0..=34 {
        let p = 1.2 + 0.05 * i as f64;
        let v = predict(&HardyParams::new(3, p, p, 0.0), &dims(1.0, 1.0, 1.0, Some(1.0)), &UNBOUNDED);
        let r7: Vec<&String> = v.fired.iter().filter(|r| r.starts_with("R7")).collect();
        assert!(r7.len() <= 1);
        if let Some(r) = r7.first() {
            seen.push(r.contains("Fails"));
        }
    }
    assert!(seen.len() > 20);
    assert_eq!(seen.windows(2).filter(|w| w[0] != w[1]).count(), 1, "{seen:?}");
    assert!(!seen[0] && *seen.last().unwrap());
}

#[test]
fn regular_unbounded_sets_hold_for_every_beta() {
    // A line in ℝ³ is 1-regular and unbounded; p < q.
    for beta in [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0] {
        let v = predict(&HardyParams::new(3, 2.0, 3.0, beta), &dims(1.0, 1.0, 1.0, Some(1.0)), &UNBOUNDED);
        assert!(v.prediction.holds(), "β = {beta}: {v:?}");
        assert!(!v.conflict);
        let expect = if beta < 0.0 { "R3" } else { "R1" };
        assert!(v.rule.starts_with(expect), "β = {beta}: {}", v.rule);
    }
}

#[test]
fn vanishing_rule_accompanies_the_thick_rule() {
    // β ≤ 0 < p − 1 whenever the vanishing rule applies, so the thick rule fires first.
    let v = predict(&HardyParams::new(3, 1.5, 2.0, -0.4), &dims(2.0, 2.0, 2.0, Some(2.0)), &UNBOUNDED);
    assert!(v.fired.iter().any(|r| r.starts_with("R4")));
    assert!(v.rule.starts_with("R3"));
    assert!(!v.conflict);
}

#[test]
fn negative_beta_failure_needs_compact_porous() {
    let p = HardyParams::new(3, 2.0, 2.5, -0.5);
    // (q/p)(n−p+β) = 0.625, n−p+β = 0.5.
    let d = dims(1.0, 0.0, 0.2, None);
    assert_eq!(predict(&p, &d, &COMPACT).prediction, Prediction::Fails);
    assert!(predict(&p, &d, &COMPACT).rule.starts_with("R6"));
    let loose = SetFlags { porous: false, ..COMPACT };
    assert_eq!(predict(&p, &d, &loose).prediction, Prediction::Unknown);
}

#[test]
fn extra_bound_rescues_thick_porous_sets() {
    // dim_A = n−1 leaves the thin rule at its margin; (p−1)(qp+np−nq)/(qp+p−q) = 1/3 here.
    let d = dims(2.0, 2.0, 2.0, Some(2.0));
    let v = predict(&HardyParams::new(3, 2.0, 4.0, 0.3), &d, &COMPACT);
    assert_eq!(v.prediction, Prediction::HoldsGlobal);
    assert!(v.rule.starts_with("R2"));
    let v = predict(&HardyParams::new(3, 2.0, 4.0, 0.5), &d, &COMPACT);
    assert_eq!(v.prediction, Prediction::Unknown);
    let loose = SetFlags { porous: false, ..COMPACT };
    assert_eq!(predict(&HardyParams::new(3, 2.0, 4.0, 0.3), &d, &loose).prediction, Prediction::Unknown);
}

#[test]
fn cross_check_examples() {
    let sphere = build_set(&SetSpec::sphere(vec![0.0; 3], 1.0), 1 << 12, 0).unwrap();
    let params = HardyParams::new(3, 2.0, 2.0, 2.0);
    let v = predict(&params, &dims(2.0, 2.0, 2.0, Some(2.0)), &COMPACT);
    assert_eq!(v.prediction, Prediction::Unknown);
    let members = (3..=7).map(|j| (j as f64, family_sphere_fj(j, 3, None).unwrap())).collect();
    let t = family_trend("sphere-fj", members, &sphere, &params, &EvalConfig::default()).unwrap();
    assert!(t.slope.unwrap() > GROWTH_SLOPE);
    assert_eq!(cross_check(&v, &[t.clone()]).status, Consistency::Consistent);

    let origin = build_set(&SetSpec::points(vec![vec![0.0; 3]]), 1 << 12, 0).unwrap();
    let params = HardyParams::new(3, 2.0, 2.0, 0.0);
    let v = predict(&params, &dims(0.0, 0.0, 0.0, Some(0.0)), &COMPACT);
    assert!(v.rule.starts_with("R1"));
    let members = (1..=5).map(|k| (k as f64, family_tent(&[0.0; 3], 0.5f64.powi(k)).unwrap())).collect();
    let flat = family_trend("tent", members, &origin, &params, &EvalConfig::default()).unwrap();
    assert!(flat.slope.unwrap().abs() < 1e-6);
    assert_eq!(cross_check(&v, &[flat.clone()]).status, Consistency::Consistent);
    // A Holds prediction against growth is a mismatch; one data point is inconclusive.
    let r = cross_check(&v, &[flat, t]);
    assert_eq!(r.status, Consistency::Mismatch);
    assert!(!r.notes.is_empty());
    let single = FamilyTrend::new("tent", vec![(1.0, 1.0)]);
    assert_eq!(cross_check(&v, &[single]).status, Consistency::Inconclusive);
}
