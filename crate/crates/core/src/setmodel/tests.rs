use super::*;
use proptest::prelude::{prop, prop_assert, proptest, ProptestConfig};

fn analytic(spec: SetSpec) -> SetHandle {
    build_set(&spec, 1, 0).unwrap()
}

fn e0_tiled() -> SetSpec {
    SetSpec::tile(SetSpec::reciprocal().in_dim(3), vec![1.0, 0.0, 0.0])
}

#[test]
fn sphere_handle() {
    let h = analytic(SetSpec::sphere(vec![0.0; 3], 1.0));
    assert_eq!(h.oracle(), OracleKind::Analytic);
    assert_eq!(h.diameter(), 2.0);
    assert!(h.bounded() && h.diameter_is_exact());
    assert_eq!(h.distance(&[0.0, 0.0, 0.0]).unwrap(), 1.0);
}

#[test]
fn subspace_handle() {
    let h = analytic(SetSpec::subspace(1, 3));
    assert_eq!(h.diameter(), f64::INFINITY);
    assert!(!h.bounded());
    assert!((h.distance(&[1.0, 2.0, 2.0]).unwrap() - 8f64.sqrt()).abs() < 1e-15);
}

#[test]
fn point_distance_is_pythagorean() {
    let h = analytic(SetSpec::points(vec![vec![0.0, 0.0]]));
    assert_eq!(h.distance(&[3.0, 4.0]).unwrap(), 5.0);
    assert_eq!(h.distance(&[1.0, 2.0, 3.0]), Err(Error::DimensionMismatch { expected: 2, got: 3 }));
}

#[test]
fn cantor_cloud_depth_and_mesh() {
    let h = build_set(&SetSpec::cantor(), 1 << 14, 0).unwrap();
    assert_eq!(h.oracle(), OracleKind::SampledCloud);
    assert_eq!(h.dim(), 2);
    assert_eq!(h.samples().unwrap().len(), 1 << 14);
    assert!(h.mesh() <= (1.0f64 / 3.0).powi(14) * (1.0 + 1e-12));
    assert!((h.diameter() - 1.0).abs() <= h.mesh() * (1.0 + 1e-9));
    assert!(!h.diameter_is_exact());
}

#[test]
fn ifs_mesh_request_picks_smallest_depth() {
    let maps = vec![IfsMap { ratio: 0.5, offset: vec![0.0] }, IfsMap { ratio: 0.5, offset: vec![0.5] }];
    let c = ifs_cloud(&maps, 1 << 20, Some(0.01));
    // diam 1, 2^-7 < 0.01 ≤ 2^-6
    assert_eq!(c.depth, 7);
    assert_eq!(ifs_bbox(&maps), (vec![0.0], vec![1.0]));
}

#[test]
fn invalid_specs_are_rejected() {
    let bad_ratio = SetSpec::ifs(vec![(1.0, vec![0.0])]);
    assert!(matches!(build_set(&bad_ratio, 10, 0), Err(Error::InvalidSpec(_))));
    let empty = SetSpec::points(vec![]);
    assert!(matches!(build_set(&empty, 10, 0), Err(Error::InvalidSpec(_))));
    let mixed = SetSpec::union(vec![SetSpec::subspace(1, 2), SetSpec::subspace(1, 3)]);
    assert!(matches!(build_set(&mixed, 10, 0), Err(Error::InvalidSpec(_))));
    let no_budget = SetSpec::cantor();
    assert!(matches!(build_set(&no_budget, 0, 0), Err(Error::InvalidSpec(_))));
    let unbounded_tile = SetSpec::tile(SetSpec::subspace(1, 2), vec![1.0, 0.0]);
    assert!(matches!(build_set(&unbounded_tile, 1, 0), Err(Error::InvalidSpec(_))));
}

#[test]
fn json_round_trip_uses_documented_field_names() {
    let spec = SetSpec::tile(SetSpec::reciprocal().in_dim(3), vec![1.0, 0.0, 0.0]).with_hausdorff_dim(0.0);
    let text = spec.to_json();
    assert!(text.contains("\"kind\": \"Tile\""));
    assert!(text.contains("\"params\""));
    assert!(text.contains("\"children\""));
    assert_eq!(SetSpec::from_json(&text).unwrap(), spec);
    let ifs = SetSpec::from_json(r#"{"kind":"IFS","params":{"maps":[{"ratio":0.5,"offset":[0]}]}}"#).unwrap();
    assert_eq!(ifs.kind, SetKind::Ifs);
}

#[test]
fn sample_points_on_sphere() {
    let h = analytic(SetSpec::sphere(vec![0.0; 3], 1.0));
    let p = h.sample_points(1, 3);
    assert_eq!(p.len(), 1);
    assert!((crate::geom::norm(&p[0]) - 1.0).abs() < 1e-12);
}

#[test]
fn sample_points_reciprocal_are_members() {
    let h = analytic(SetSpec::reciprocal());
    let p = h.sample_points(5, 11);
    assert_eq!(p.len(), 5);
    for (i, q) in p.iter().enumerate() {
        assert_eq!(q[1], 0.0);
        let t = q[0];
        assert!(t == 0.0 || ((1.0 / t).round() - 1.0 / t).abs() < 1e-9, "{t}");
        for r in &p[..i] {
            assert_ne!(r, q);
        }
    }
}

#[test]
fn cloud_sampling_is_deterministic() {
    let h = build_set(&SetSpec::cantor(), 1 << 12, 0).unwrap();
    let a = h.sample_points(100, 5);
    let b = h.sample_points(100, 5);
    assert_eq!(a, b);
    assert_eq!(a.len(), 100);
    for q in &a {
        assert!(h.dist(q) <= h.mesh());
    }
}

#[test]
fn sample_region_covers_within_mesh() {
    let h = analytic(SetSpec::sphere(vec![0.0; 3], 1.0));
    let pts = h.sample_region(&Bounds::cube(&[0.0; 3], 1.01), 0.1);
    let tree = KdTree::new(&pts);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y = h.nearest(&v);
        assert!(tree.nearest(&y).1.sqrt() <= 0.1);
    }
    for q in &pts {
        assert!(h.dist(q) < 1e-12);
    }
}

#[test]
fn tiled_reciprocal_distance_is_periodic() {
    let h = analytic(e0_tiled());
    assert!(!h.bounded());
    let x = [0.37, 0.2, -0.1];
    let y = [3.37, 0.2, -0.1];
    assert!((h.dist(&x) - h.dist(&y)).abs() < 1e-12);
    assert_eq!(h.dist(&[5.0, 0.0, 0.0]), 0.0);
    assert_eq!(h.dist(&[-2.5, 0.0, 0.0]), 0.0);
    assert!(h.dist(&[0.45, 0.0, 0.0]) > 0.0);
}

#[test]
fn union_product_translate() {
    let seg = SetSpec::axis_box(vec![0.0], vec![1.0]);
    let square_edge = SetSpec::product(vec![seg.clone(), SetSpec::points(vec![vec![0.0]])]);
    let h = analytic(SetSpec::translate(square_edge, vec![1.0, 1.0]));
    assert_eq!(h.dist(&[1.5, 3.0]), 2.0);
    assert_eq!(h.diameter(), 1.0);
    let u =
        analytic(SetSpec::union(vec![SetSpec::points(vec![vec![0.0, 0.0]]), SetSpec::points(vec![vec![10.0, 0.0]])]));
    assert_eq!(u.dist(&[9.0, 0.0]), 1.0);
    assert!((u.diameter() - 10.0).abs() < 1e-9);
}

#[test]
fn one_dimensional_sets_are_embedded_in_the_plane() {
    let h = analytic(SetSpec::axis_box(vec![0.0], vec![1.0]));
    assert_eq!(h.dim(), 2);
    assert_eq!(h.dist(&[0.5, -2.0]), 2.0);
}

fn gallery_like() -> Vec<SetHandle> {
    vec![
        analytic(SetSpec::sphere(vec![0.0; 3], 1.0)),
        analytic(SetSpec::subspace(1, 3)),
        analytic(e0_tiled()),
        analytic(SetSpec::axis_box(vec![-0.5, 0.0], vec![0.5, 0.0])),
        build_set(&SetSpec::cantor(), 1 << 10, 0).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_one_lipschitz(which in 0usize..5, a in prop::collection::vec(-3.0f64..3.0, 3), b in prop::collection::vec(-3.0f64..3.0, 3)) {
        let sets = gallery_like();
        let h = &sets[which];
        let n = h.dim();
        let (x, y) = (&a[..n], &b[..n]);
        prop_assert!((h.dist(x) - h.dist(y)).abs() <= crate::geom::dist(x, y) + 1e-12);
    }

    #[test]
    fn nearest_point_realizes_distance(which in 0usize..5, a in prop::collection::vec(-3.0f64..3.0, 3)) {
        let sets = gallery_like();
        let h = &sets[which];
        let x = &a[..h.dim()];
        let p = h.nearest(x);
        prop_assert!(h.dist(&p) <= 1e-12);
        prop_assert!((crate::geom::dist(x, &p) - h.dist(x)).abs() <= 1e-9);
    }

    #[test]
    fn cloud_overestimates_by_at_most_mesh(t in 0.0f64..1.0, addr in prop::collection::vec(0usize..2, 30)) {
        // A deep address gives an attractor point to high accuracy.
        let h = build_set(&SetSpec::cantor(), 1 << 8, 0).unwrap();
        let mut y = 0.0;
        for &a in addr.iter().rev() {
            y = y / 3.0 + if a == 1 { 2.0 / 3.0 } else { 0.0 };
        }
        prop_assert!(h.dist(&[y, 0.0]) <= h.mesh() + 1e-12);
        let _ = t;
    }
}
