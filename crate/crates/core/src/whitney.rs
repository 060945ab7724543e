//! Whitney decomposition of `G = ℝⁿ \ E` inside a box.

use crate::geom::Bounds;
use crate::setmodel::SetHandle;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

/// Cubes visited before [`whitney_decompose`] gives up.
pub const NODE_BUDGET: usize = 1 << 25;
pub const MAX_GENERATION: u32 = 40;

/// Dilation factor `L = 10√n` used when Whitney cubes are enlarged.
pub fn dilation_factor(n: usize) -> f64 {
    10.0 * (n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitneyCube {
    pub center: Vec<f64>,
    pub side: f64,
    /// `side = base·2^{−generation}`; negative when the box had to be enlarged.
    pub generation: i32,
}

impl WhitneyCube {
    pub fn diam(&self) -> f64 {
        self.side * (self.center.len() as f64).sqrt()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let h = 0.5 * self.side;
        self.center.iter().zip(x).all(|(c, v)| *v >= c - h && *v < c + h)
    }

    /// Lower and upper bounds on `dist(Q, E)`: center distance minus the half-diagonal,
    /// and the smallest distance at the center or a corner.
    pub fn dist_bounds(&self, set: &SetHandle) -> (f64, f64) {
        let n = self.center.len();
        let dc = set.dist(&self.center);
        let lower = (dc - 0.5 * self.diam()).max(0.0);
        let mut upper = dc;
        if n <= 10 {
            let mut corner = vec![0.0; n];
            for mask in 0..1usize << n {
                for a in 0..n {
                    corner[a] = self.center[a] + if mask >> a & 1 == 1 { 0.5 } else { -0.5 } * self.side;
                }
                upper = upper.min(set.dist(&corner));
            }
        }
        (lower, upper)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Whitney {
    /// Accepted cubes in Morton order.
    pub cubes: Vec<WhitneyCube>,
    /// Cube the subdivision starts from: the box's enclosing cube, doubled while it is
    /// too small for its distance to `E`.
    pub root: Bounds,
    pub root_generation: i32,
    pub base_side: f64,
    pub max_generation: u32,
    /// Box volume left in cubes still too close to `E` at `max_generation`.
    pub truncated_volume: f64,
    pub truncated_cubes: usize,
}

impl Whitney {
    /// Accepted cube count per generation, from the smallest generation present.
    pub fn generation_counts(&self) -> Vec<(i32, usize)> {
        let mut out: Vec<(i32, usize)> = Vec::new();
        let mut gens: Vec<i32> = self.cubes.iter().map(|c| c.generation).collect();
        gens.sort_unstable();
        for g in gens {
            match out.last_mut() {
                Some((h, k)) if *h == g => *k += 1,
                _ => out.push((g, 1)),
            }
        }
        out
    }

    /// CSV rows `generation,x0,..,side`.
    pub fn to_csv(&self) -> String {
        let n = self.root.dim();
        let mut s = String::from("generation,");
        for a in 0..n {
            s += &format!("x{a},");
        }
        s += "side\n";
        for c in &self.cubes {
            s += &c.generation.to_string();
            for v in &c.center {
                s += &format!(",{v}");
            }
            s += &format!(",{}\n", c.side);
        }
        s
    }
}

struct Walk<'a> {
    set: &'a SetHandle,
    bx: &'a Bounds,
    max_gen: i32,
    visited: AtomicUsize,
}

struct Part {
    cubes: Vec<WhitneyCube>,
    truncated_volume: f64,
    truncated: usize,
}

impl Walk<'_> {
    fn visit(&self, center: Vec<f64>, side: f64, generation: i32) -> Result<Part> {
        let seen = self.visited.fetch_add(1, AtomicOrdering::Relaxed) + 1;
        if seen > NODE_BUDGET {
            return Err(Error::BudgetExceeded { requested: seen, cap: NODE_BUDGET });
        }
        let overlap = clipped_volume(self.bx, &center, side);
        if overlap <= 0.0 {
            return Ok(Part { cubes: Vec::new(), truncated_volume: 0.0, truncated: 0 });
        }
        let cube = WhitneyCube { center, side, generation };
        let d = cube.diam();
        let dc = self.set.dist(&cube.center);
        if dc - 0.5 * d >= d {
            return Ok(Part { cubes: vec![cube], truncated_volume: 0.0, truncated: 0 });
        }
        if generation >= self.max_gen {
            return Ok(Part { cubes: Vec::new(), truncated_volume: overlap, truncated: 1 });
        }
        let n = cube.center.len();
        let q = 0.25 * side;
        let children: Vec<Vec<f64>> = (0..1usize << n)
            .map(|mask| (0..n).map(|a| cube.center[a] + if mask >> a & 1 == 1 { q } else { -q }).collect())
            .collect();
        let parts: Vec<Result<Part>> = if generation < 4 {
            children.into_par_iter().map(|c| self.visit(c, 0.5 * side, generation + 1)).collect()
        } else {
            children.into_iter().map(|c| self.visit(c, 0.5 * side, generation + 1)).collect()
        };
        let mut out = Part { cubes: Vec::new(), truncated_volume: 0.0, truncated: 0 };
        for p in parts {
            let p = p?;
            out.cubes.extend(p.cubes);
            out.truncated_volume += p.truncated_volume;
            out.truncated += p.truncated;
        }
        Ok(out)
    }
}

fn clipped_volume(bx: &Bounds, center: &[f64], side: f64) -> f64 {
    let h = 0.5 * side;
    let mut v = 1.0;
    for a in 0..center.len() {
        v *= ((center[a] + h).min(bx.upper[a]) - (center[a] - h).max(bx.lower[a])).max(0.0);
    }
    v
}

/// Dyadic subdivision of the box's enclosing cube. A cube is accepted once
/// `δ(center) − diam/2 ≥ diam`; since its parent failed that test, `dist(Q,E) ≤ δ(center)
/// ≤ 4·diam` follows. Cubes still too close at `max_generation` are dropped and their
/// volume is recorded. Cubes missing the box are skipped.
pub fn whitney_decompose(set: &SetHandle, bx: &Bounds, max_generation: u32) -> Result<Whitney> {
    let n = set.dim();
    if bx.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: bx.dim() });
    }
    if max_generation == 0 || max_generation > MAX_GENERATION {
        return Err(Error::InvalidArgument(format!("max_generation must be in 1..={MAX_GENERATION}")));
    }
    let base_side = bx.max_side();
    let center = bx.center();
    let mut side = base_side;
    let mut generation = 0i32;
    // A root farther than 4·diam from E cannot be fixed by splitting; grow it instead.
    while set.dist(&center) > 4.0 * side * (n as f64).sqrt() {
        side *= 2.0;
        generation -= 1;
    }
    let walk = Walk { set, bx, max_gen: max_generation as i32, visited: AtomicUsize::new(0) };
    let part = walk.visit(center.clone(), side, generation)?;
    let root = Bounds::cube(&center, 0.5 * side);
    let mut cubes = part.cubes;
    let finest = side * 0.5f64.powi(max_generation as i32 - generation);
    let keys: Vec<Vec<u64>> = cubes
        .iter()
        .map(|c| (0..n).map(|a| ((c.center[a] - 0.5 * c.side - root.lower[a]) / finest).round() as u64).collect())
        .collect();
    let mut order: Vec<usize> = (0..cubes.len()).collect();
    order.sort_by(|&i, &j| morton_cmp(&keys[i], &keys[j]).then(cubes[i].generation.cmp(&cubes[j].generation)));
    let mut sorted = Vec::with_capacity(cubes.len());
    for i in order {
        sorted.push(std::mem::replace(&mut cubes[i], WhitneyCube { center: Vec::new(), side: 0.0, generation: 0 }));
    }
    Ok(Whitney {
        cubes: sorted,
        root,
        root_generation: generation,
        base_side,
        max_generation,
        truncated_volume: part.truncated_volume,
        truncated_cubes: part.truncated,
    })
}

/// Z-order comparison without building interleaved keys: the axis whose coordinates
/// differ in the highest bit decides.
fn morton_cmp(a: &[u64], b: &[u64]) -> Ordering {
    let less_msb = |x: u64, y: u64| x < y && x < (x ^ y);
    let mut axis = 0;
    for k in 1..a.len() {
        if less_msb(a[axis] ^ b[axis], a[k] ^ b[k]) {
            axis = k;
        }
    }
    a[axis].cmp(&b[axis])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    /// `dist(Q,E) < diam(Q)` cannot be ruled out.
    TooClose {
        index: usize,
        dist_lower: f64,
        diam: f64,
    },
    /// `dist(Q,E) > 4·diam(Q)`.
    TooFar {
        index: usize,
        dist_upper: f64,
        diam: f64,
    },
    Overlap {
        first: usize,
        second: usize,
    },
}

/// Cubes violating `diam ≤ dist(Q,E) ≤ 4·diam`, and pairs with overlapping interiors.
pub fn whitney_validate(cubes: &[WhitneyCube], set: &SetHandle) -> Vec<Violation> {
    let mut out: Vec<Violation> = cubes
        .par_iter()
        .enumerate()
        .filter_map(|(index, c)| {
            let (lo, hi) = c.dist_bounds(set);
            let diam = c.diam();
            if lo < diam * (1.0 - 1e-12) {
                Some(Violation::TooClose { index, dist_lower: lo, diam })
            } else if hi > 4.0 * diam * (1.0 + 1e-12) {
                Some(Violation::TooFar { index, dist_upper: hi, diam })
            } else {
                None
            }
        })
        .collect();
    out.extend(dyadic_overlaps(cubes).unwrap_or_else(|| overlaps(cubes)));
    out
}

/// Finest-grid lower corners and size exponents when all cubes lie on one dyadic
/// lattice: sides `s_min·2^k`, lower corners multiples of the side from a common origin.
fn lattice(cubes: &[WhitneyCube]) -> Option<Vec<(Vec<u64>, u32)>> {
    let n = cubes.first()?.center.len();
    let s_min = cubes.iter().map(|c| c.side).fold(f64::INFINITY, f64::min);
    if !(s_min > 0.0) {
        return None;
    }
    let big = cubes.iter().max_by(|a, b| a.side.total_cmp(&b.side))?;
    let origin: Vec<f64> = (0..n).map(|a| big.center[a] - 0.5 * big.side).collect();
    let mut raw: Vec<(Vec<i64>, u32)> = Vec::with_capacity(cubes.len());
    for c in cubes {
        let ratio = c.side / s_min;
        let k = ratio.log2().round();
        if k > 60.0 || (ratio - k.exp2()).abs() > 1e-9 * ratio {
            return None;
        }
        let mut ix = Vec::with_capacity(n);
        for a in 0..n {
            let t = (c.center[a] - 0.5 * c.side - origin[a]) / c.side;
            let r = t.round();
            if (t - r).abs() > 1e-9 || (r * ratio).abs() > 2f64.powi(60) {
                return None;
            }
            ix.push(r as i64 * (1i64 << k as u32));
        }
        raw.push((ix, k as u32));
    }
    let lo: Vec<i64> = (0..n).map(|a| raw.iter().map(|r| r.0[a]).min().unwrap_or(0)).collect();
    Some(raw.into_iter().map(|(ix, k)| (ix.iter().zip(&lo).map(|(v, l)| (v - l) as u64).collect(), k)).collect())
}

/// Aligned dyadic cubes either nest or are disjoint. In Z-order, larger first on ties,
/// every cube containing the current one is still on the stack.
fn dyadic_overlaps(cubes: &[WhitneyCube]) -> Option<Vec<Violation>> {
    let keys = lattice(cubes)?;
    let contains = |a: &(Vec<u64>, u32), b: &(Vec<u64>, u32)| {
        a.1 >= b.1 && a.0.iter().zip(&b.0).all(|(x, y)| x <= y && *y < x + (1u64 << a.1))
    };
    let mut order: Vec<usize> = (0..cubes.len()).collect();
    order.sort_by(|&i, &j| morton_cmp(&keys[i].0, &keys[j].0).then(keys[j].1.cmp(&keys[i].1)).then(i.cmp(&j)));
    let mut stack: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    for i in order {
        stack.retain(|&j| contains(&keys[j], &keys[i]));
        out.extend(stack.iter().map(|&j| Violation::Overlap { first: i.min(j), second: i.max(j) }));
        stack.push(i);
    }
    out.sort_by_key(|v| match v {
        Violation::Overlap { first, second } => (*first, *second),
        _ => (0, 0),
    });
    Some(out)
}

/// Sweep along the first axis; interiors overlap when every axis overlaps by more than
/// a rounding margin.
fn overlaps(cubes: &[WhitneyCube]) -> Vec<Violation> {
    let Some(n) = cubes.first().map(|c| c.center.len()) else {
        return Vec::new();
    };
    let lo = |c: &WhitneyCube, a: usize| c.center[a] - 0.5 * c.side;
    let hi = |c: &WhitneyCube, a: usize| c.center[a] + 0.5 * c.side;
    let mut order: Vec<usize> = (0..cubes.len()).collect();
    order.sort_by(|&i, &j| lo(&cubes[i], 0).total_cmp(&lo(&cubes[j], 0)).then(i.cmp(&j)));
    let mut out: Vec<Violation> = order
        .par_iter()
        .enumerate()
        .flat_map_iter(|(k, &i)| {
            let a = &cubes[i];
            let mut found = Vec::new();
            for &j in &order[k + 1..] {
                let b = &cubes[j];
                let eps = 1e-9 * a.side.min(b.side);
                if lo(b, 0) >= hi(a, 0) - eps {
                    break;
                }
                if (0..n).all(|ax| hi(a, ax).min(hi(b, ax)) - lo(a, ax).max(lo(b, ax)) > eps) {
                    found.push(Violation::Overlap { first: i.min(j), second: i.max(j) });
                }
            }
            found
        })
        .collect();
    out.sort_by_key(|v| match v {
        Violation::Overlap { first, second } => (*first, *second),
        _ => (0, 0),
    });
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub probes: usize,
    /// Probes with `δ > 2^{2−max_generation}·diam(box)`.
    pub eligible: usize,
    pub uncovered: usize,
    /// Eligible probes inside more than one cube.
    pub repeated: usize,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        self.uncovered == 0 && self.repeated == 0
    }
}

/// Uniform probes in the box; each eligible probe must lie in exactly one cube. Cubes
/// are looked up per generation on the root's dyadic lattice.
pub fn whitney_probe(w: &Whitney, set: &SetHandle, bx: &Bounds, probes: usize, seed: u64) -> ProbeReport {
    let n = bx.dim();
    let root_side = w.root.side(0);
    let side_of = |g: i32| root_side * 0.5f64.powi(g - w.root_generation);
    let mut cells: FxHashMap<(i32, Vec<i64>), usize> = FxHashMap::default();
    for c in &w.cubes {
        let ix = (0..n).map(|a| ((c.center[a] - 0.5 * c.side - w.root.lower[a]) / c.side).round() as i64).collect();
        *cells.entry((c.generation, ix)).or_default() += 1;
    }
    let mut gens: Vec<i32> = cells.keys().map(|k| k.0).collect();
    gens.sort_unstable();
    gens.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec<f64>> =
        (0..probes).map(|_| (0..n).map(|a| rng.gen_range(bx.lower[a]..bx.upper[a])).collect()).collect();
    let floor = 2f64.powi(2 - w.max_generation as i32) * bx.diameter();
    let hits: Vec<Option<usize>> = pts
        .par_iter()
        .map(|x| {
            (set.dist(x) > floor).then(|| {
                gens.iter()
                    .map(|&g| {
                        let h = side_of(g);
                        let ix: Vec<i64> = (0..n).map(|a| ((x[a] - w.root.lower[a]) / h).floor() as i64).collect();
                        cells.get(&(g, ix)).copied().unwrap_or(0)
                    })
                    .sum()
            })
        })
        .collect();
    let eligible = hits.iter().flatten().count();
    ProbeReport {
        probes,
        eligible,
        uncovered: hits.iter().flatten().filter(|&&k| k == 0).count(),
        repeated: hits.iter().flatten().filter(|&&k| k > 1).count(),
    }
}
