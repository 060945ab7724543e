//! Slow brute-force references: exact small covers, plain Riemann sums, and exhaustive
//! Rayleigh-quotient search on tiny grids.

use crate::geom::{dist, Bounds};
use crate::hardy::HardyParams;
use crate::setmodel::SetHandle;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const BRUTE_MAX_POINTS: usize = 2000;
/// Ball populations up to this size are covered exactly.
pub const BRUTE_EXACT_POINTS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteCover {
    pub count: usize,
    /// False when the count is a greedy upper bound.
    pub exact: bool,
}

/// Fewest open `r`-balls covering `points ∩ B̄(center, R)`. Exact when the ball holds at
/// most [`BRUTE_EXACT_POINTS`] points in dimension ≤ 3: candidate centers are the
/// circumcenters of all subsets of up to `n+1` points, which include the centers of
/// every minimal enclosing ball.
pub fn brute_covering(points: &[Vec<f64>], center: &[f64], big_r: f64, r: f64) -> Result<BruteCover> {
    if points.len() > BRUTE_MAX_POINTS {
        return Err(Error::TooLarge(format!("{} points, limit {BRUTE_MAX_POINTS}", points.len())));
    }
    let inside: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).filter(|p| dist(p, center) <= big_r).collect();
    if inside.is_empty() {
        return Ok(BruteCover { count: 0, exact: true });
    }
    let n = center.len();
    if inside.len() > BRUTE_EXACT_POINTS || n > 3 {
        return Ok(BruteCover { count: greedy_cover(&inside, r), exact: false });
    }
    let k = inside.len();
    let mut sets: Vec<u32> = Vec::new();
    let mut subset = Vec::with_capacity(n + 1);
    for_each_subset(k, n + 1, &mut subset, 0, &mut |s| {
        let pts: Vec<&[f64]> = s.iter().map(|&i| inside[i]).collect();
        if let Some(c) = circumcenter(&pts) {
            let mask = (0..k).filter(|&i| dist(inside[i], &c) < r).fold(0u32, |m, i| m | 1 << i);
            if mask != 0 {
                sets.push(mask);
            }
        }
    });
    sets.sort_unstable();
    sets.dedup();
    let maximal: Vec<u32> = sets.iter().copied().filter(|&a| !sets.iter().any(|&b| b != a && b & a == a)).collect();
    let full = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    let mut best = k;
    cover_search(&maximal, full, 0, 0, &mut best);
    Ok(BruteCover { count: best, exact: true })
}

fn for_each_subset(k: usize, max: usize, cur: &mut Vec<usize>, start: usize, f: &mut dyn FnMut(&[usize])) {
    if !cur.is_empty() {
        f(cur);
    }
    if cur.len() == max {
        return;
    }
    for i in start..k {
        cur.push(i);
        for_each_subset(k, max, cur, i + 1, f);
        cur.pop();
    }
}

/// Center of the sphere through `pts` within their affine hull.
fn circumcenter(pts: &[&[f64]]) -> Option<Vec<f64>> {
    let p0 = pts[0];
    let m = pts.len() - 1;
    let v: Vec<Vec<f64>> = pts[1..].iter().map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect()).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    // Gram system 2·G·λ = |v_i|².
    let mut a: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row: Vec<f64> = (0..m).map(|j| 2.0 * dot(&v[i], &v[j])).collect();
            row.push(dot(&v[i], &v[i]));
            row
        })
        .collect();
    let scale = a.iter().map(|r| r[m].abs()).fold(0.0, f64::max).max(1e-300);
    for col in 0..m {
        let piv = (col..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() <= 1e-10 * scale {
            return None;
        }
        a.swap(col, piv);
        for row in 0..m {
            if row != col {
                let f = a[row][col] / a[col][col];
                for c in col..=m {
                    a[row][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut c = p0.to_vec();
    for i in 0..m {
        let lam = a[i][m] / a[i][i];
        for (cj, vj) in c.iter_mut().zip(&v[i]) {
            *cj += lam * vj;
        }
    }
    Some(c)
}

fn cover_search(sets: &[u32], full: u32, covered: u32, used: usize, best: &mut usize) {
    if covered == full {
        *best = (*best).min(used);
        return;
    }
    if used + 1 >= *best {
        return;
    }
    let first = (!covered & full).trailing_zeros();
    let mut options: Vec<u32> = sets.iter().copied().filter(|s| s >> first & 1 == 1).collect();
    options.sort_by_key(|s| std::cmp::Reverse((s & !covered).count_ones()));
    for s in options {
        cover_search(sets, full, covered | s, used + 1, best);
    }
}

fn greedy_cover(pts: &[&[f64]], r: f64) -> usize {
    let mut left: Vec<usize> = (0..pts.len()).collect();
    let mut count = 0;
    while !left.is_empty() {
        let (best, _) = left
            .iter()
            .map(|&c| (c, left.iter().filter(|&&i| dist(pts[i], pts[c]) < r).count()))
            .max_by_key(|&(c, k)| (k, std::cmp::Reverse(c)))
            .unwrap();
        left.retain(|&i| dist(pts[i], pts[best]) >= r);
        count += 1;
    }
    count
}

/// Plain midpoint sum of `δ_E^γ` over `B(center, radius)` with `subdivisions` cells per
/// axis of the enclosing cube. Cells centered on `E` contribute 0 when `γ < 0`.
pub fn riemann_integral(gamma: f64, set: &SetHandle, center: &[f64], radius: f64, subdivisions: usize) -> Result<f64> {
    let n = set.dim();
    if n > 3 || center.len() != n {
        return Err(Error::InvalidArgument("riemann_integral supports n ≤ 3".into()));
    }
    if subdivisions == 0 || subdivisions > 512 {
        return Err(Error::InvalidArgument("subdivisions must be in 1..=512".into()));
    }
    let h = 2.0 * radius / subdivisions as f64;
    let mut total = 0.0;
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    'cells: loop {
        for k in 0..n {
            x[k] = center[k] - radius + (idx[k] as f64 + 0.5) * h;
        }
        if dist(&x, center) < radius {
            let d = set.dist(&x);
            if !(d == 0.0 && gamma < 0.0) {
                total += if gamma == 0.0 { 1.0 } else { d.powf(gamma) };
            }
        }
        for k in 0..n {
            idx[k] += 1;
            if idx[k] < subdivisions {
                continue 'cells;
            }
            idx[k] = 0;
        }
        break;
    }
    Ok(total * h.powi(n as i32))
}

/// Largest grid accepted by [`brute_rayleigh_max`].
pub const BRUTE_MAX_AXIS: usize = 9;

/// Maximum of `κ̂ = lhs^{1/q}/rhs^{1/p}` over nonnegative grid functions on `m` cells per
/// axis of `bounds`, `m ≤ 9`, `n ≤ 2`: cell-center values, a zero ring outside, forward
/// differences from every cell of `[−1, m−1]ⁿ`, midpoint weights `hⁿ δ^{lhs weight}` and
/// `hⁿ δ^β`. Pattern search from 20 seeded starts, each run until no coordinate move of
/// relative size `1e−7` improves.
pub fn brute_rayleigh_max(set: &SetHandle, params: &HardyParams, bounds: &Bounds, m: usize) -> Result<f64> {
    let n = set.dim();
    if n > 2 || m > BRUTE_MAX_AXIS {
        return Err(Error::TooLarge(format!("n = {n}, {m} cells per axis; limits 2 and {BRUTE_MAX_AXIS}")));
    }
    if bounds.dim() != n || params.n != n {
        return Err(Error::DimensionMismatch { expected: n, got: bounds.dim() });
    }
    let g = Ghosted::new(set, params, bounds, m);
    let free: Vec<usize> = g.free.clone();
    let mut best = 0.0f64;
    for start in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ start);
        let mut u = vec![0.0; g.len()];
        for &i in &free {
            u[i] = rng.gen_range(0.05..1.0);
        }
        let mut cur = g.kappa(&u);
        let mut step = 0.5;
        while step > 1e-7 {
            let mut moved = false;
            for &i in &free {
                let top = free.iter().map(|&j| u[j]).fold(0.0, f64::max);
                let old = u[i];
                for t in [old * (1.0 + step), old * (1.0 - step), old + step * top, (old - step * top).max(0.0), 0.0] {
                    u[i] = t;
                    let k = g.kappa(&u);
                    if k > cur * (1.0 + 1e-13) {
                        cur = k;
                        moved = true;
                        break;
                    }
                    u[i] = old;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        best = best.max(cur);
    }
    Ok(best)
}

/// Grid values with one ghost layer on each side, stored on `(m+2)ⁿ` cells.
struct Ghosted {
    n: usize,
    w: usize,
    h: f64,
    p: f64,
    q: f64,
    lhs: Vec<f64>,
    rhs: Vec<f64>,
    free: Vec<usize>,
}

impl Ghosted {
    fn new(set: &SetHandle, params: &HardyParams, b: &Bounds, m: usize) -> Self {
        let n = set.dim();
        let w = m + 2;
        let h = b.side(0) / m as f64;
        let vol = h.powi(n as i32);
        let gamma = params.lhs_weight();
        let len = w.pow(n as u32);
        let mut lhs = vec![0.0; len];
        let mut rhs = vec![0.0; len];
        let mut free = Vec::new();
        for cell in 0..len {
            let coords: Vec<usize> = (0..n).map(|k| cell / w.pow(k as u32) % w).collect();
            let x: Vec<f64> = coords.iter().enumerate().map(|(k, &c)| b.lower[k] + (c as f64 - 0.5) * h).collect();
            let d = set.dist(&x);
            let interior = coords.iter().all(|&c| (1..=m).contains(&c));
            if coords.iter().all(|&c| c <= m) {
                let db = d.max(1e-12 * h);
                rhs[cell] = vol * if params.beta == 0.0 { 1.0 } else { db.powf(params.beta) };
            }
            if interior && !(d <= 1e-12 * h && gamma < 0.0) {
                lhs[cell] = vol * if gamma == 0.0 { 1.0 } else { d.powf(gamma) };
                free.push(cell);
            }
        }
        Self { n, w, h, p: params.p, q: params.q, lhs, rhs, free }
    }

    fn len(&self) -> usize {
        self.lhs.len()
    }

    fn kappa(&self, u: &[f64]) -> f64 {
        let mut l = 0.0;
        let mut r = 0.0;
        for c in 0..u.len() {
            if self.lhs[c] > 0.0 && u[c] > 0.0 {
                l += self.lhs[c] * u[c].powf(self.q);
            }
            if self.rhs[c] > 0.0 {
                let mut g2 = 0.0;
                for k in 0..self.n {
                    let d = (u[c + self.w.pow(k as u32)] - u[c]) / self.h;
                    g2 += d * d;
                }
                if g2 > 0.0 {
                    r += self.rhs[c] * g2.powf(0.5 * self.p);
                }
            }
        }
        if r > 0.0 {
            l.powf(1.0 / self.q) / r.powf(1.0 / self.p)
        } else {
            0.0
        }
    }
}
