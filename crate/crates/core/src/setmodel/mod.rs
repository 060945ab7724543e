//! Closed sets `E ⊂ ℝⁿ` built from a declarative [`SetSpec`] tree, with a distance
//! oracle, point sampling and diameter queries.
//!
//! Every constructor except `IFS` has an exact analytic distance. IFS attractors are
//! replaced by a finite address cloud, and the handle records the resulting mesh `ε`:
//! every attractor point lies within `ε` of a cloud point, so cloud distances
//! overestimate the true distance by at most `ε`.

mod kdtree;
mod shape;
mod spec;

pub use kdtree::KdTree;
pub use shape::MAX_DIM;
pub use spec::{IfsMap, SetKind, SetParams, SetSpec};

use crate::geom::{dist2, Bounds};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use shape::Shape;

/// How distances are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleKind {
    Analytic,
    SampledCloud,
}

/// Half-width of the default window used for unbounded sets.
pub const DEFAULT_WINDOW_HALF: f64 = 2.0;

/// Immutable, compiled set with its distance oracle.
#[derive(Debug, Clone)]
pub struct SetHandle {
    spec: SetSpec,
    shape: Shape,
    oracle: OracleKind,
    mesh: f64,
    samples: Option<Vec<Vec<f64>>>,
    diameter: f64,
    diameter_exact: bool,
    window: Bounds,
    seed: u64,
}

/// Builds a set from its spec. IFS nodes are enumerated to at most `sample_budget`
/// addresses each.
pub fn build_set(spec: &SetSpec, sample_budget: usize, seed: u64) -> Result<SetHandle> {
    let mut clouds = CloudInfo::default();
    let mut shape = compile(spec, sample_budget, &mut clouds)?;
    if shape.dim() == 1 {
        // Sets given on the line live on the first axis of the plane.
        shape = Shape::Product(vec![(0, shape), (1, Shape::Cloud(KdTree::new(&[vec![0.0]])))]);
    }
    let n = shape.dim();
    if n > MAX_DIM {
        return Err(Error::InvalidSpec(format!("ambient dimension {n} exceeds {MAX_DIM}")));
    }
    let oracle = if clouds.count > 0 { OracleKind::SampledCloud } else { OracleKind::Analytic };
    let bbox = shape.bbox();
    let window = match &spec.params.window {
        Some([lo, hi]) => {
            if lo.len() != n || hi.len() != n {
                return Err(Error::InvalidSpec("window dimension differs from the set".into()));
            }
            Bounds::new(lo.clone(), hi.clone()).map_err(|e| Error::InvalidSpec(e.to_string()))?
        }
        None => default_window(bbox.as_ref(), n),
    };
    let mut handle = SetHandle {
        spec: spec.clone(),
        shape,
        oracle,
        mesh: clouds.mesh,
        samples: None,
        diameter: f64::INFINITY,
        diameter_exact: true,
        window,
        seed,
    };
    if oracle == OracleKind::SampledCloud {
        if let Shape::Cloud(t) = pure_cloud(&handle.shape) {
            handle.samples = Some(t.points().map(|q| pad(q, n)).collect());
        }
    }
    if bbox.is_some() {
        let (d, exact) = handle.compute_diameter();
        handle.diameter = d;
        handle.diameter_exact = exact;
    }
    Ok(handle)
}

/// The cloud behind a handle whose shape is a single (possibly padded) cloud.
fn pure_cloud(shape: &Shape) -> &Shape {
    match shape {
        Shape::Product(ch) if ch.len() == 2 && matches!(ch[1].1, Shape::Cloud(ref t) if t.len() == 1) => {
            pure_cloud(&ch[0].1)
        }
        s => s,
    }
}

fn default_window(bbox: Option<&(Vec<f64>, Vec<f64>)>, n: usize) -> Bounds {
    match bbox {
        Some((lo, hi)) => {
            let ext = lo.iter().zip(hi).map(|(a, b)| b - a).fold(0.0, f64::max).max(1e-3);
            let pad = 0.25 * ext;
            let lower = lo.iter().map(|v| v - pad).collect();
            let upper = hi.iter().map(|v| v + pad).collect();
            Bounds::new(lower, upper).expect("padded box is proper")
        }
        None => Bounds::cube(&vec![0.0; n], DEFAULT_WINDOW_HALF),
    }
}

#[derive(Default)]
struct CloudInfo {
    count: usize,
    mesh: f64,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidSpec(msg.into()))
}

fn finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        invalid(format!("{what} has non-finite entries"))
    }
}

fn compile(spec: &SetSpec, budget: usize, clouds: &mut CloudInfo) -> Result<Shape> {
    let p = &spec.params;
    let need_children = |k: usize| -> Result<()> {
        match (k, spec.children.len()) {
            (0, 0) => Ok(()),
            (0, c) => invalid(format!("{:?} takes no children, got {c}", spec.kind)),
            (1, 1) => Ok(()),
            (1, c) => invalid(format!("{:?} takes exactly one child, got {c}", spec.kind)),
            (_, 0) => invalid(format!("{:?} needs at least one child", spec.kind)),
            _ => Ok(()),
        }
    };
    match spec.kind {
        SetKind::Points => {
            need_children(0)?;
            let pts = p.points.as_ref().filter(|v| !v.is_empty());
            let Some(pts) = pts else {
                return invalid("Points needs a non-empty point list");
            };
            let n = pts[0].len();
            if n == 0 || pts.iter().any(|q| q.len() != n) {
                return invalid("Points entries must share a positive dimension");
            }
            for q in pts {
                finite(q, "point")?;
            }
            Ok(Shape::Cloud(KdTree::new(pts)))
        }
        SetKind::Subspace => {
            need_children(0)?;
            let Some(n) = p.n else {
                return invalid("Subspace needs ambient dimension n");
            };
            let axes = match (&p.axes, p.m) {
                (Some(a), m) => {
                    if m.is_some_and(|m| m != a.len()) {
                        return invalid("Subspace m differs from the number of axes");
                    }
                    a.clone()
                }
                (None, Some(m)) => (0..m).collect(),
                (None, None) => return invalid("Subspace needs m or axes"),
            };
            if n == 0 || axes.len() > n {
                return invalid("Subspace needs 0 ≤ m ≤ n and n ≥ 1");
            }
            let mut mask = vec![false; n];
            for &a in &axes {
                if a >= n || mask[a] {
                    return invalid("Subspace axes must be distinct and below n");
                }
                mask[a] = true;
            }
            Ok(Shape::Subspace { mask })
        }
        SetKind::Sphere => {
            need_children(0)?;
            let (Some(center), Some(radius)) = (&p.center, p.radius) else {
                return invalid("Sphere needs center and radius");
            };
            finite(center, "center")?;
            if center.is_empty() || !(radius > 0.0 && radius.is_finite()) {
                return invalid("Sphere needs a non-empty center and radius > 0");
            }
            Ok(Shape::Sphere { center: center.clone(), radius })
        }
        SetKind::AxisBox => {
            need_children(0)?;
            let (Some(lower), Some(upper)) = (&p.lower, &p.upper) else {
                return invalid("AxisBox needs lower and upper");
            };
            finite(lower, "lower")?;
            finite(upper, "upper")?;
            if lower.is_empty() || lower.len() != upper.len() || lower.iter().zip(upper).any(|(a, b)| a > b) {
                return invalid("AxisBox needs lower ≤ upper of equal dimension");
            }
            Ok(Shape::AxisBox { lower: lower.clone(), upper: upper.clone() })
        }
        SetKind::Ifs => {
            need_children(0)?;
            let maps = p.maps.as_deref().unwrap_or(&[]);
            if maps.is_empty() {
                return invalid("IFS needs at least one map");
            }
            let k = maps[0].offset.len();
            if k == 0 || maps.iter().any(|m| m.offset.len() != k) {
                return invalid("IFS offsets must share a positive dimension");
            }
            for m in maps {
                finite(&m.offset, "IFS offset")?;
                if !(m.ratio > 0.0 && m.ratio < 1.0) {
                    return invalid(format!("IFS ratio {} outside (0,1)", m.ratio));
                }
            }
            let n = p.n.unwrap_or(k);
            if n < k {
                return invalid("IFS padding dimension below offset dimension");
            }
            if budget == 0 {
                return invalid("IFS needs a sample budget ≥ 1");
            }
            let cloud = ifs_cloud(maps, budget, p.mesh);
            clouds.count += 1;
            clouds.mesh = clouds.mesh.max(cloud.mesh);
            let pts: Vec<Vec<f64>> = cloud
                .points
                .into_iter()
                .map(|mut q| {
                    q.resize(n, 0.0);
                    q
                })
                .collect();
            Ok(Shape::Cloud(KdTree::new(&pts)))
        }
        SetKind::ReciprocalSequence => {
            need_children(0)?;
            let n = p.n.unwrap_or(1);
            if n == 0 {
                return invalid("ReciprocalSequence needs n ≥ 1");
            }
            Ok(Shape::Reciprocal { n })
        }
        SetKind::Union => {
            need_children(2)?;
            let ch = spec.children.iter().map(|c| compile(c, budget, clouds)).collect::<Result<Vec<_>>>()?;
            let n = ch[0].dim();
            if ch.iter().any(|c| c.dim() != n) {
                return invalid("Union children have different ambient dimensions");
            }
            Ok(Shape::Union(ch))
        }
        SetKind::Product => {
            need_children(2)?;
            let mut start = 0;
            let mut blocks = Vec::new();
            for c in &spec.children {
                let s = compile(c, budget, clouds)?;
                let k = s.dim();
                blocks.push((start, s));
                start += k;
            }
            Ok(Shape::Product(blocks))
        }
        SetKind::Translate => {
            need_children(1)?;
            let Some(offset) = &p.offset else {
                return invalid("Translate needs an offset");
            };
            finite(offset, "offset")?;
            let child = compile(&spec.children[0], budget, clouds)?;
            if child.dim() != offset.len() {
                return invalid("Translate offset dimension differs from its child");
            }
            Ok(Shape::Translate { offset: offset.clone(), child: Box::new(child) })
        }
        SetKind::Tile => {
            need_children(1)?;
            let Some(period) = &p.period else {
                return invalid("Tile needs a period");
            };
            finite(period, "period")?;
            if period.iter().all(|v| *v == 0.0) {
                return invalid("Tile period must be non-zero");
            }
            let child = compile(&spec.children[0], budget, clouds)?;
            if child.dim() != period.len() {
                return invalid("Tile period dimension differs from its child");
            }
            if child.bbox().is_none() {
                return invalid("Tile needs a bounded child");
            }
            Ok(Shape::tile(period.clone(), child))
        }
    }
}

/// Address cloud of an IFS attractor.
pub struct IfsCloud {
    pub points: Vec<Vec<f64>>,
    pub depth: u32,
    /// Every attractor point lies within this distance of a cloud point.
    pub mesh: f64,
}

/// Exact bounding box of the attractor of homotheties `x ↦ r·x + b`, found as the
/// fixed point of the box iteration.
pub fn ifs_bbox(maps: &[IfsMap]) -> (Vec<f64>, Vec<f64>) {
    let k = maps[0].offset.len();
    let mut lo = vec![0.0; k];
    let mut hi = vec![0.0; k];
    for _ in 0..10_000 {
        let mut changed = false;
        for i in 0..k {
            let nl = maps.iter().map(|m| m.ratio * lo[i] + m.offset[i]).fold(f64::INFINITY, f64::min);
            let nh = maps.iter().map(|m| m.ratio * hi[i] + m.offset[i]).fold(f64::NEG_INFINITY, f64::max);
            changed |= nl != lo[i] || nh != hi[i];
            lo[i] = nl;
            hi[i] = nh;
        }
        if !changed {
            break;
        }
    }
    (lo, hi)
}

/// Enumerates all depth-`d` addresses applied to the fixed point of the first map.
///
/// Without a requested mesh `d` is the largest depth with `m^d ≤ budget`; with one it is
/// the smallest depth reaching the mesh, still capped by the budget.
pub fn ifs_cloud(maps: &[IfsMap], budget: usize, mesh: Option<f64>) -> IfsCloud {
    let m = maps.len();
    let rmax = maps.iter().map(|f| f.ratio).fold(0.0, f64::max);
    let (lo, hi) = ifs_bbox(maps);
    let diam = dist2(&lo, &hi).sqrt();
    let mut cap = 0u32;
    let mut count = 1usize;
    while m > 1 && count.saturating_mul(m) <= budget && cap < 64 {
        count *= m;
        cap += 1;
    }
    if m == 1 {
        cap = 0;
    }
    let depth = match mesh {
        Some(target) if target > 0.0 => {
            let mut d = 0;
            while d < cap && diam * rmax.powi(d as i32) > target {
                d += 1;
            }
            d
        }
        _ => cap,
    };
    let k = maps[0].offset.len();
    let r0 = maps[0].ratio;
    let x0: Vec<f64> = maps[0].offset.iter().map(|b| b / (1.0 - r0)).collect();
    let mut points = vec![x0];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(points.len() * m);
        for f in maps {
            for q in &points {
                next.push((0..k).map(|i| f.ratio * q[i] + f.offset[i]).collect());
            }
        }
        points = next;
    }
    points.sort_by(|a, b| lex_cmp(a, b));
    points.dedup();
    IfsCloud { points, depth, mesh: diam * rmax.powi(depth as i32) }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
}

impl SetHandle {
    pub fn spec(&self) -> &SetSpec {
        &self.spec
    }

    pub fn oracle(&self) -> OracleKind {
        self.oracle
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    /// Sampling mesh `ε` (zero for analytic oracles).
    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    /// Cloud points when the whole set is a single sampled cloud.
    pub fn samples(&self) -> Option<&[Vec<f64>]> {
        self.samples.as_deref()
    }

    pub fn bounded(&self) -> bool {
        self.diameter.is_finite()
    }

    /// `diam(E)`; `+∞` for unbounded sets. See [`SetHandle::diameter_is_exact`].
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// False when the diameter is a sample-based lower bound.
    pub fn diameter_is_exact(&self) -> bool {
        self.diameter_exact
    }

    /// Box used by grid operations: a padded bounding box, or the spec window.
    pub fn window(&self) -> &Bounds {
        &self.window
    }

    /// Exact axis-aligned bounding box of `E` when bounded.
    pub fn bbox(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        self.shape.bbox()
    }

    pub fn hausdorff_dim(&self) -> Option<f64> {
        self.spec.params.hausdorff_dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `dist(x, E)`, checking the dimension of `x`.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(self.dist(x))
    }

    /// `dist(x, E)` without the dimension check.
    #[inline]
    pub fn dist(&self, x: &[f64]) -> f64 {
        self.shape.distance(x)
    }

    /// A point of `E` (of the cloud, for sampled sets) nearest to `x`.
    pub fn nearest(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.shape.nearest(x, &mut out);
        out
    }

    fn compute_diameter(&self) -> (f64, bool) {
        match pure_cloud(&self.shape) {
            Shape::Cloud(t) if self.oracle == OracleKind::SampledCloud || t.len() > 4096 => {
                (cloud_diameter_lower(t), false)
            }
            Shape::Cloud(t) => {
                let pts: Vec<&[f64]> = t.points().collect();
                let mut best = 0.0f64;
                for i in 0..pts.len() {
                    for j in i + 1..pts.len() {
                        best = best.max(dist2(pts[i], pts[j]));
                    }
                }
                (best.sqrt(), true)
            }
            Shape::Union(_) => {
                let (lo, hi) = self.shape.bbox().expect("bounded");
                let ext = dist2(&lo, &hi).sqrt().max(1e-9);
                let region = Bounds::new(
                    lo.iter().map(|v| v - 1e-9 * ext).collect(),
                    hi.iter().map(|v| v + 1e-9 * ext).collect(),
                )
                .expect("proper box");
                let pts = self.sample_region(&region, ext / 64.0);
                let d = pts.iter().map(|q| self.shape.farthest(q)).fold(0.0, f64::max);
                (d, false)
            }
            s => {
                let (lo, _) = s.bbox().expect("bounded");
                let mut p = vec![0.0; lo.len()];
                s.nearest(&lo, &mut p);
                match exact_diameter(s) {
                    Some(d) => (d, self.oracle == OracleKind::Analytic),
                    None => (s.farthest(&p), false),
                }
            }
        }
    }

    /// Points of `E` inside `region` such that every point of `E ∩ region` lies
    /// within `mesh` of one of them (plus the cloud mesh for sampled sets).
    /// Sorted lexicographically, without duplicates.
    pub fn sample_region(&self, region: &Bounds, mesh: f64) -> Vec<Vec<f64>> {
        if let Shape::Cloud(t) = pure_cloud(&self.shape) {
            let mut out: Vec<Vec<f64>> =
                t.points().filter(|q| region.contains(&pad(q, self.dim()))).map(|q| pad(q, self.dim())).collect();
            out.sort_by(|a, b| lex_cmp(a, b));
            return out;
        }
        let n = self.dim();
        let leaf = mesh / (n as f64).sqrt();
        let mut lower = [0.0; MAX_DIM];
        lower[..n].copy_from_slice(&region.lower);
        let root = Cell { lower, side: region.max_side() };
        // Split a few levels sequentially so the parallel part has enough tasks.
        let mut frontier = vec![root];
        while !frontier.is_empty() && frontier.len() < 64 && frontier[0].side > leaf {
            frontier = frontier.iter().filter(|c| self.cell_hits(c, n)).flat_map(|c| c.children(n)).collect();
        }
        let mut out: Vec<Vec<f64>> = frontier
            .par_iter()
            .flat_map_iter(|c| {
                let mut acc = Vec::new();
                self.octree(c, n, leaf, &mut acc);
                acc
            })
            .filter(|q| region.contains(q))
            .collect();
        out.sort_by(|a, b| lex_cmp(a, b));
        out.dedup();
        out
    }

    fn cell_hits(&self, c: &Cell, n: usize) -> bool {
        let half = 0.5 * c.side;
        let mut center = [0.0; MAX_DIM];
        for a in 0..n {
            center[a] = c.lower[a] + half;
        }
        self.dist(&center[..n]) <= half * (n as f64).sqrt() * (1.0 + 1e-12) + self.mesh
    }

    fn octree(&self, c: &Cell, n: usize, leaf: f64, acc: &mut Vec<Vec<f64>>) {
        if !self.cell_hits(c, n) {
            return;
        }
        if c.side <= leaf {
            let center: Vec<f64> = c.lower[..n].iter().map(|v| v + 0.5 * c.side).collect();
            acc.push(self.nearest(&center));
            return;
        }
        let h = 0.5 * c.side;
        for mask in 0..1usize << n {
            let mut ch = Cell { lower: c.lower, side: h };
            for a in 0..n {
                if mask >> a & 1 == 1 {
                    ch.lower[a] += h;
                }
            }
            self.octree(&ch, n, leaf, acc);
        }
    }

    /// Points of `E ∩ B(center, radius)` at the given mesh.
    pub fn sample_ball(&self, center: &[f64], radius: f64, mesh: f64) -> Vec<Vec<f64>> {
        let region = Bounds::cube(center, radius * (1.0 + 1e-12));
        let r2 = radius * radius;
        self.sample_region(&region, mesh).into_iter().filter(|q| dist2(q, center) <= r2).collect()
    }

    /// Up to `count` well-spread points of `E` (inside the window for unbounded sets),
    /// chosen by farthest-point traversal from a seeded start.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let pool = self.sample_pool(count.max(1));
        farthest_point_sample(&pool, count, seed)
    }

    fn sample_pool(&self, count: usize) -> Vec<Vec<f64>> {
        let region = match self.shape.bbox() {
            Some((lo, hi)) => {
                let ext = dist2(&lo, &hi).sqrt().max(1e-9);
                Bounds::new(lo.iter().map(|v| v - 1e-9 * ext).collect(), hi.iter().map(|v| v + 1e-9 * ext).collect())
                    .expect("proper box")
            }
            None => self.window.clone(),
        };
        if let Shape::Cloud(_) = pure_cloud(&self.shape) {
            return self.sample_region(&region, 0.0);
        }
        let want = (4 * count).max(64);
        let mut mesh = region.diameter() / 16.0;
        let mut pool = self.sample_region(&region, mesh);
        for _ in 0..12 {
            if pool.len() >= want {
                break;
            }
            mesh /= 2.0;
            let next = self.sample_region(&region, mesh);
            if next.len() == pool.len() && mesh < 1e-6 * region.diameter() {
                break;
            }
            pool = next;
        }
        pool
    }
}

fn pad(q: &[f64], n: usize) -> Vec<f64> {
    let mut v = q.to_vec();
    v.resize(n, 0.0);
    v
}

/// Exact diameters of the single constructors and their products/translates.
fn exact_diameter(s: &Shape) -> Option<f64> {
    match s {
        Shape::Sphere { radius, .. } => Some(2.0 * radius),
        Shape::AxisBox { lower, upper } => Some(dist2(lower, upper).sqrt()),
        Shape::Reciprocal { .. } => Some(1.0),
        Shape::Subspace { mask } if mask.iter().all(|m| !m) => Some(0.0),
        Shape::Translate { child, .. } => exact_diameter(child),
        Shape::Product(ch) => {
            ch.iter().map(|(_, c)| exact_diameter(c).map(|d| d * d)).sum::<Option<f64>>().map(f64::sqrt)
        }
        Shape::Cloud(t) if t.len() <= 4096 => {
            let pts: Vec<&[f64]> = t.points().collect();
            let mut best = 0.0f64;
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    best = best.max(dist2(pts[i], pts[j]));
                }
            }
            Some(best.sqrt())
        }
        _ => None,
    }
}

/// Lower bound on the diameter of a large cloud by repeated farthest-point sweeps.
fn cloud_diameter_lower(t: &KdTree) -> f64 {
    let far = |x: &[f64]| {
        t.points().enumerate().map(|(i, p)| (i, dist2(p, x))).fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a })
    };
    let mut best = 0.0f64;
    let starts = [0, t.len() / 3, 2 * t.len() / 3];
    for &s in &starts {
        let mut cur = s;
        for _ in 0..4 {
            let (j, d) = far(t.point(cur));
            if d <= best * best && j == cur {
                break;
            }
            best = best.max(d.sqrt());
            cur = j;
        }
    }
    best
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    lower: [f64; MAX_DIM],
    side: f64,
}

impl Cell {
    fn children(&self, n: usize) -> Vec<Cell> {
        let h = 0.5 * self.side;
        (0..1usize << n)
            .map(|mask| {
                let mut lower = self.lower;
                for a in 0..n {
                    if mask >> a & 1 == 1 {
                        lower[a] += h;
                    }
                }
                Cell { lower, side: h }
            })
            .collect()
    }
}

/// Farthest-point traversal over `pool` starting at a seeded random element.
pub fn farthest_point_sample(pool: &[Vec<f64>], count: usize, seed: u64) -> Vec<Vec<f64>> {
    if pool.is_empty() || count == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.gen_range(0..pool.len());
    let mut chosen = vec![pool[first].clone()];
    let mut gap: Vec<f64> = pool.iter().map(|q| dist2(q, &pool[first])).collect();
    while chosen.len() < count.min(pool.len()) {
        let (j, d) = gap.iter().copied().enumerate().fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
        if d <= 0.0 {
            break;
        }
        let p = pool[j].clone();
        for (g, q) in gap.iter_mut().zip(pool) {
            *g = g.min(dist2(q, &p));
        }
        chosen.push(p);
    }
    chosen
}

#[cfg(test)]
mod tests;
