//! Compiled form of a [`SetSpec`](super::SetSpec): a tree with allocation-free
//! distance and nearest-point queries.

use super::kdtree::KdTree;
use crate::geom::dist2;

/// Largest supported ambient dimension (fixed-size scratch buffers).
pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone)]
pub(crate) enum Shape {
    /// Finite point set; also the realization of IFS attractors.
    Cloud(KdTree),
    /// Span of the coordinate axes flagged `true`.
    Subspace {
        mask: Vec<bool>,
    },
    Sphere {
        center: Vec<f64>,
        radius: f64,
    },
    /// Solid box, possibly flat along some axes.
    AxisBox {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    /// `{0} ∪ {1/j}` on the first axis of ℝⁿ.
    Reciprocal {
        n: usize,
    },
    Union(Vec<Shape>),
    /// Factors with the starting coordinate of each block.
    Product(Vec<(usize, Shape)>),
    Translate {
        offset: Vec<f64>,
        child: Box<Shape>,
    },
    Tile {
        period: Vec<f64>,
        norm2: f64,
        proj: (f64, f64),
        child: Box<Shape>,
    },
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Cloud(t) => t.dim(),
            Shape::Subspace { mask } => mask.len(),
            Shape::Sphere { center, .. } => center.len(),
            Shape::AxisBox { lower, .. } => lower.len(),
            Shape::Reciprocal { n } => *n,
            Shape::Union(ch) => ch[0].dim(),
            Shape::Product(ch) => ch.iter().map(|(_, s)| s.dim()).sum(),
            Shape::Translate { offset, .. } => offset.len(),
            Shape::Tile { period, .. } => period.len(),
        }
    }

    pub fn tile(period: Vec<f64>, child: Shape) -> Self {
        let norm2: f64 = period.iter().map(|v| v * v).sum();
        let (lo, hi) = child.bbox().expect("tiled child is bounded");
        let (mut a, mut b) = (0.0, 0.0);
        for i in 0..period.len() {
            let (u, w) = (lo[i] * period[i], hi[i] * period[i]);
            a += u.min(w);
            b += u.max(w);
        }
        Shape::Tile { period, norm2, proj: (a / norm2, b / norm2), child: Box::new(child) }
    }

    /// Squared distance from `x` to the set.
    pub fn dist2(&self, x: &[f64]) -> f64 {
        match self {
            Shape::Cloud(t) => t.nearest(x).1,
            Shape::Subspace { mask } => x.iter().zip(mask).filter(|(_, &m)| !m).map(|(v, _)| v * v).sum(),
            Shape::Sphere { center, radius } => {
                let d = dist2(x, center).sqrt() - radius;
                d * d
            }
            Shape::AxisBox { lower, upper } => {
                let mut s = 0.0;
                for i in 0..x.len() {
                    let d = (lower[i] - x[i]).max(x[i] - upper[i]).max(0.0);
                    s += d * d;
                }
                s
            }
            Shape::Reciprocal { .. } => {
                let rest: f64 = x[1..].iter().map(|v| v * v).sum();
                let d = x[0] - reciprocal_nearest(x[0]);
                d * d + rest
            }
            Shape::Union(ch) => ch.iter().map(|c| c.dist2(x)).fold(f64::INFINITY, f64::min),
            Shape::Product(ch) => ch.iter().map(|(start, c)| c.dist2(&x[*start..start + c.dim()])).sum(),
            Shape::Translate { offset, child } => {
                let mut buf = [0.0; MAX_DIM];
                let y = shifted(x, offset, 1.0, &mut buf);
                child.dist2(y)
            }
            Shape::Tile { .. } => self.tile_search(x).1,
        }
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        self.dist2(x).sqrt()
    }

    /// Writes a nearest point of the set to `out`.
    pub fn nearest(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Shape::Cloud(t) => out.copy_from_slice(t.point(t.nearest(x).0)),
            Shape::Subspace { mask } => {
                for i in 0..x.len() {
                    out[i] = if mask[i] { x[i] } else { 0.0 };
                }
            }
            Shape::Sphere { center, radius } => {
                let d = dist2(x, center).sqrt();
                if d == 0.0 {
                    out.copy_from_slice(center);
                    out[0] += radius;
                } else {
                    for i in 0..x.len() {
                        out[i] = center[i] + radius * (x[i] - center[i]) / d;
                    }
                }
            }
            Shape::AxisBox { lower, upper } => {
                for i in 0..x.len() {
                    out[i] = x[i].clamp(lower[i], upper[i]);
                }
            }
            Shape::Reciprocal { .. } => {
                out.fill(0.0);
                out[0] = reciprocal_nearest(x[0]);
            }
            Shape::Union(ch) => {
                let best =
                    ch.iter().map(|c| c.dist2(x)).enumerate().min_by(|a, b| a.1.total_cmp(&b.1)).map_or(0, |(i, _)| i);
                ch[best].nearest(x, out);
            }
            Shape::Product(ch) => {
                for (start, c) in ch {
                    let k = c.dim();
                    c.nearest(&x[*start..start + k], &mut out[*start..start + k]);
                }
            }
            Shape::Translate { offset, child } => {
                let mut buf = [0.0; MAX_DIM];
                child.nearest(shifted(x, offset, 1.0, &mut buf), out);
                for (o, v) in out.iter_mut().zip(offset) {
                    *o += v;
                }
            }
            Shape::Tile { period, child, .. } => {
                let k = self.tile_search(x).0 as f64;
                let mut buf = [0.0; MAX_DIM];
                child.nearest(shifted(x, period, k, &mut buf), out);
                for (o, v) in out.iter_mut().zip(period) {
                    *o += k * v;
                }
            }
        }
    }

    /// Copy index and squared distance of the closest translate `child + k·period`.
    fn tile_search(&self, x: &[f64]) -> (i64, f64) {
        let Shape::Tile { period, norm2, proj, child } = self else { unreachable!() };
        let t = x.iter().zip(period).map(|(a, b)| a * b).sum::<f64>() / norm2;
        let k0 = (t - 0.5 * (proj.0 + proj.1)).round() as i64;
        let mut buf = [0.0; MAX_DIM];
        let mut eval = |k: i64| child.dist2(shifted(x, period, k as f64, &mut buf));
        let mut best = (k0, eval(k0));
        // Lower bound on the squared distance to copy k from the projection onto the period.
        let bound = |k: i64| {
            let kf = k as f64;
            let gap = (proj.0 + kf - t).max(t - proj.1 - kf).max(0.0);
            gap * gap * norm2
        };
        for dir in [1i64, -1] {
            let mut k = k0 + dir;
            while bound(k) < best.1 {
                let d = eval(k);
                if d < best.1 {
                    best = (k, d);
                }
                k += dir;
            }
        }
        best
    }

    /// Largest distance from `x` to a point of the set.
    pub fn farthest(&self, x: &[f64]) -> f64 {
        match self {
            Shape::Cloud(t) => t.points().map(|p| dist2(p, x)).fold(0.0, f64::max).sqrt(),
            Shape::Subspace { mask } => {
                if mask.iter().any(|&m| m) {
                    f64::INFINITY
                } else {
                    crate::geom::norm(x)
                }
            }
            Shape::Sphere { center, radius } => dist2(x, center).sqrt() + radius,
            Shape::AxisBox { lower, upper } => {
                let mut s = 0.0;
                for i in 0..x.len() {
                    let d = (x[i] - lower[i]).abs().max((x[i] - upper[i]).abs());
                    s += d * d;
                }
                s.sqrt()
            }
            Shape::Reciprocal { .. } => {
                let rest: f64 = x[1..].iter().map(|v| v * v).sum();
                let d = x[0].abs().max((x[0] - 1.0).abs());
                (d * d + rest).sqrt()
            }
            Shape::Union(ch) => ch.iter().map(|c| c.farthest(x)).fold(0.0, f64::max),
            Shape::Product(ch) => {
                ch.iter().map(|(start, c)| c.farthest(&x[*start..start + c.dim()]).powi(2)).sum::<f64>().sqrt()
            }
            Shape::Translate { offset, child } => {
                let mut buf = [0.0; MAX_DIM];
                child.farthest(shifted(x, offset, 1.0, &mut buf))
            }
            Shape::Tile { .. } => f64::INFINITY,
        }
    }

    /// Exact axis-aligned bounding box, `None` when unbounded.
    pub fn bbox(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            Shape::Cloud(t) => {
                let n = t.dim();
                let mut lo = vec![f64::INFINITY; n];
                let mut hi = vec![f64::NEG_INFINITY; n];
                for p in t.points() {
                    for i in 0..n {
                        lo[i] = lo[i].min(p[i]);
                        hi[i] = hi[i].max(p[i]);
                    }
                }
                Some((lo, hi))
            }
            Shape::Subspace { mask } => {
                if mask.iter().any(|&m| m) {
                    None
                } else {
                    Some((vec![0.0; mask.len()], vec![0.0; mask.len()]))
                }
            }
            Shape::Sphere { center, radius } => {
                Some((center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect()))
            }
            Shape::AxisBox { lower, upper } => Some((lower.clone(), upper.clone())),
            Shape::Reciprocal { n } => {
                let mut hi = vec![0.0; *n];
                hi[0] = 1.0;
                Some((vec![0.0; *n], hi))
            }
            Shape::Union(ch) => {
                let mut it = ch.iter().map(|c| c.bbox());
                let (mut lo, mut hi) = it.next()??;
                for b in it {
                    let (l, h) = b?;
                    for i in 0..lo.len() {
                        lo[i] = lo[i].min(l[i]);
                        hi[i] = hi[i].max(h[i]);
                    }
                }
                Some((lo, hi))
            }
            Shape::Product(ch) => {
                let (mut lo, mut hi) = (Vec::new(), Vec::new());
                for (_, c) in ch {
                    let (l, h) = c.bbox()?;
                    lo.extend(l);
                    hi.extend(h);
                }
                Some((lo, hi))
            }
            Shape::Translate { offset, child } => {
                let (l, h) = child.bbox()?;
                Some((
                    l.iter().zip(offset).map(|(a, b)| a + b).collect(),
                    h.iter().zip(offset).map(|(a, b)| a + b).collect(),
                ))
            }
            Shape::Tile { .. } => None,
        }
    }
}

/// `x - k·v` written into `buf`.
fn shifted<'a>(x: &[f64], v: &[f64], k: f64, buf: &'a mut [f64; MAX_DIM]) -> &'a [f64] {
    for i in 0..x.len() {
        buf[i] = x[i] - k * v[i];
    }
    &buf[..x.len()]
}

/// Nearest element of `{0} ∪ {1/j : j ≥ 1}` to `t`.
pub(crate) fn reciprocal_nearest(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let j = (1.0 / t).floor();
    let mut best = 0.0;
    for c in [1.0 / j, 1.0 / (j + 1.0)] {
        if (c - t).abs() < (best - t).abs() {
            best = c;
        }
    }
    best
}
