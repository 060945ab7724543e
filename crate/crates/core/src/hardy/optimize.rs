//! Lower bounds for the best constant: sweeps over bundled families and coordinate
//! ascent on grid functions.

use super::exponents::HardyParams;
use super::family::{family_axis_power, family_bump, family_radial_power, family_tent, Shape, TestFunction};
use super::functional::{evaluate_functional, geometry, EvalConfig, EvalMethod, Geometry, SideValues};
use crate::geom::Bounds;
use crate::setmodel::SetHandle;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest interior grid accepted by [`DiscreteProblem`].
pub const MAX_GRID_CELLS: usize = 1 << 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    FamilySweep,
    GridAscent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    /// Cells per axis of the ascent grid.
    pub grid: usize,
    /// Ascent box; defaults to [`default_box`].
    pub bounds: Option<Bounds>,
    /// Random starts besides the best family member.
    pub starts: usize,
    pub eval: EvalConfig,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self { grid: 16, bounds: None, starts: 3, eval: EvalConfig::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub kappa: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub strategy: Strategy,
    pub best: SideValues,
    pub trace: Vec<TraceRow>,
    /// Members left out: zero right side or a divergent integral.
    pub skipped: Vec<String>,
}

impl ConstantEstimate {
    pub fn kappa(&self) -> f64 {
        self.best.ratio.unwrap_or(0.0)
    }

    pub fn trace_csv(&self) -> String {
        let mut s = String::from("iteration,kappa,lhs,rhs\n");
        for r in &self.trace {
            s += &format!("{},{},{},{}\n", r.iteration, r.kappa, r.lhs, r.rhs);
        }
        s
    }
}

/// A cube around `E`: its padded bounding box, the window of an unbounded set, or
/// `[c−1, c+1]ⁿ` around a single point.
pub fn default_box(set: &SetHandle) -> Bounds {
    match set.bbox() {
        Some((lo, hi)) => {
            let c: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
            let half = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (b - a)).fold(0.0, f64::max);
            Bounds::cube(&c, (1.25 * half).max(1.0))
        }
        None => {
            let w = set.window();
            let c = w.center();
            Bounds::cube(&c, 0.5 * w.max_side())
        }
    }
}

/// Bundled members in a fixed order, so a budget selects a prefix.
pub fn family_members(set: &SetHandle, params: &HardyParams, seed: u64) -> Vec<TestFunction> {
    let n = set.dim();
    let mut out = Vec::new();
    let geo = geometry(set);
    match &geo {
        Geometry::Sphere(c, r) => {
            for j in 2..=10 {
                out.push(TestFunction::new(Shape::SphereFj { center: c.clone(), radius: *r, j }));
            }
        }
        Geometry::Point(c) => {
            let crit = (n as f64 - params.p + params.beta) / params.p;
            for depth in [10, 40, 80] {
                for s in [1.0, 0.9, 0.75, 0.5] {
                    if let Ok(f) = family_radial_power(c, crit * s, 2f64.powi(-depth), 1.0) {
                        out.push(f);
                    }
                }
            }
        }
        Geometry::Line(axis) => {
            for k in 1..=8 {
                out.extend(family_axis_power(n, *axis, 2f64.powi(-k), 1.0, 1.0));
            }
        }
        Geometry::Other => {}
    }
    let scale = if set.bounded() { set.diameter().max(1e-3) } else { set.window().max_side() / 4.0 };
    let centers = match &geo {
        Geometry::Point(c) => vec![c.clone()],
        Geometry::Line(_) => vec![vec![0.0; n]],
        _ => set.sample_points(4, seed),
    };
    for k in 1..=8 {
        let r = scale * 2f64.powi(-k);
        for c in &centers {
            out.extend(family_bump(c, r));
            out.extend(family_tent(c, r));
        }
    }
    out
}

/// Evaluates the first `budget` bundled members; the best finite ratio wins.
fn family_sweep(
    set: &SetHandle,
    params: &HardyParams,
    budget: usize,
    seed: u64,
    cfg: &EvalConfig,
) -> Result<ConstantEstimate> {
    let members: Vec<TestFunction> = family_members(set, params, seed).into_iter().take(budget).collect();
    let results: Vec<(String, Result<SideValues>)> =
        members.par_iter().map(|f| (f.label(), evaluate_functional(f, set, params, cfg))).collect();
    let mut best: Option<SideValues> = None;
    let mut trace = Vec::new();
    let mut skipped = Vec::new();
    for (i, (label, r)) in results.into_iter().enumerate() {
        match r {
            Ok(v) => match v.ratio {
                Some(k) if k.is_finite() => {
                    trace.push(TraceRow { iteration: i, kappa: k, lhs: v.lhs, rhs: v.rhs });
                    if best.as_ref().is_none_or(|b| k > b.ratio.unwrap()) {
                        best = Some(v);
                    }
                }
                _ => skipped.push(format!("{label}: zero right-hand side")),
            },
            Err(Error::Divergent(m)) => skipped.push(format!("{label}: divergent {m}")),
            Err(e) => return Err(e),
        }
    }
    let best = best.ok_or_else(|| Error::InvalidArgument("no family member gave a finite ratio".into()))?;
    Ok(ConstantEstimate { strategy: Strategy::FamilySweep, best, trace, skipped })
}

/// Grid functions on `m` cells per axis of a box, zero on a ghost ring. Gradients are
/// forward differences on the index range `[−1, m−1]ⁿ`; both sides are midpoint sums.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    pub n: usize,
    pub m: usize,
    pub bounds: Bounds,
    pub h: f64,
    pub p: f64,
    pub q: f64,
    /// `hⁿ δ^{lhs weight}` per interior cell; zero where the cell is frozen.
    lhs_w: Vec<f64>,
    /// Cells whose center lies on `E` under a negative left weight; held at 0.
    frozen: Vec<bool>,
    /// `hⁿ δ^β` per cell of the extended range, indexed with offset 1.
    rhs_w: Vec<f64>,
}

impl DiscreteProblem {
    pub fn new(set: &SetHandle, params: &HardyParams, bounds: &Bounds, m: usize) -> Result<Self> {
        let n = set.dim();
        if params.n != n || bounds.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: bounds.dim() });
        }
        if m < 2 || !bounds.is_cube() {
            return Err(Error::InvalidArgument("ascent grid needs a cube and m ≥ 2".into()));
        }
        let cells = (m + 1).checked_pow(n as u32).unwrap_or(usize::MAX);
        if cells > MAX_GRID_CELLS {
            return Err(Error::BudgetExceeded { requested: cells, cap: MAX_GRID_CELLS });
        }
        let h = bounds.side(0) / m as f64;
        let vol = h.powi(n as i32);
        let gamma = params.lhs_weight();
        let center = |idx: &[i64]| -> Vec<f64> {
            idx.iter().enumerate().map(|(k, &i)| bounds.lower[k] + (i as f64 + 0.5) * h).collect()
        };
        let interior = m.pow(n as u32);
        let (lhs_w, frozen): (Vec<f64>, Vec<bool>) = (0..interior)
            .into_par_iter()
            .map(|i| {
                let d = set.dist(&center(&unravel(i, m, n, 0)));
                if d <= 1e-12 * h && gamma < 0.0 {
                    (0.0, true)
                } else {
                    (vol * pow_or_one(d, gamma), false)
                }
            })
            .unzip();
        let rhs_w = (0..cells)
            .into_par_iter()
            .map(|e| {
                let d = set.dist(&center(&unravel(e, m + 1, n, 1)));
                vol * pow_or_one(d.max(1e-12 * h), params.beta)
            })
            .collect();
        Ok(Self { n, m, bounds: bounds.clone(), h, p: params.p, q: params.q, lhs_w, frozen, rhs_w })
    }

    pub fn cells(&self) -> usize {
        self.lhs_w.len()
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    /// Values of `f` at the cell centers, zero on frozen cells.
    pub fn realize(&self, f: &TestFunction) -> Vec<f64> {
        (0..self.cells())
            .map(|i| {
                if self.frozen[i] {
                    return 0.0;
                }
                let x: Vec<f64> = unravel(i, self.m, self.n, 0)
                    .iter()
                    .enumerate()
                    .map(|(k, &j)| self.bounds.lower[k] + (j as f64 + 0.5) * self.h)
                    .collect();
                f.value(&x).abs()
            })
            .collect()
    }

    fn at(&self, u: &[f64], idx: &[i64]) -> f64 {
        let m = self.m as i64;
        let mut i = 0usize;
        for k in (0..self.n).rev() {
            if idx[k] < 0 || idx[k] >= m {
                return 0.0;
            }
            i = i * self.m + idx[k] as usize;
        }
        u[i]
    }

    /// `hⁿ δ^β |∇u|^p` on extended cell `e`.
    fn rhs_term(&self, u: &[f64], e: usize) -> f64 {
        let idx = unravel(e, self.m + 1, self.n, 1);
        let base = self.at(u, &idx);
        let mut g2 = 0.0;
        let mut nb = idx.clone();
        for k in 0..self.n {
            nb[k] += 1;
            let d = (self.at(u, &nb) - base) / self.h;
            nb[k] -= 1;
            g2 += d * d;
        }
        if g2 == 0.0 {
            0.0
        } else {
            self.rhs_w[e] * g2.powf(0.5 * self.p)
        }
    }

    /// `(lhs, rhs)` of a grid function.
    pub fn sides(&self, u: &[f64]) -> (f64, f64) {
        let lhs = self.lhs_w.iter().zip(u).map(|(w, v)| if *v == 0.0 { 0.0 } else { w * v.abs().powf(self.q) }).sum();
        let rhs = (0..self.rhs_w.len()).map(|e| self.rhs_term(u, e)).sum();
        (lhs, rhs)
    }

    pub fn ratio(&self, u: &[f64]) -> Option<f64> {
        let (l, r) = self.sides(u);
        (r > 0.0).then(|| l.powf(1.0 / self.q) / r.powf(1.0 / self.p))
    }

    /// Extended cells whose gradient involves interior cell `i`.
    fn touching(&self, i: usize) -> Vec<usize> {
        let idx = unravel(i, self.m, self.n, 0);
        let ext = |idx: &[i64]| idx.iter().rev().fold(0usize, |acc, &j| acc * (self.m + 1) + (j + 1) as usize);
        let mut out = vec![ext(&idx)];
        let mut nb = idx.clone();
        for k in 0..self.n {
            nb[k] -= 1;
            out.push(ext(&nb));
            nb[k] += 1;
        }
        out
    }

    /// Projected coordinate ascent from `u0`: each sweep maximizes the ratio in every
    /// free coordinate over `[0, T]` by golden section and rescales to unit right side.
    pub fn ascend(&self, u0: &[f64], sweeps: usize) -> (Vec<f64>, Vec<TraceRow>) {
        let mut u: Vec<f64> = u0.iter().enumerate().map(|(i, v)| if self.frozen[i] { 0.0 } else { v.abs() }).collect();
        let mut trace = Vec::new();
        let (mut lhs, mut rhs) = self.sides(&u);
        if rhs <= 0.0 {
            return (u, trace);
        }
        let log_ratio =
            |l: f64, r: f64| if l > 0.0 && r > 0.0 { l.ln() / self.q - r.ln() / self.p } else { f64::NEG_INFINITY };
        let mut current = log_ratio(lhs, rhs);
        for sweep in 0..sweeps {
            let top = u.iter().fold(0.0f64, |a, &b| a.max(b));
            for i in 0..self.cells() {
                if self.frozen[i] {
                    continue;
                }
                let touch = self.touching(i);
                let old = u[i];
                let local = |u: &mut Vec<f64>, t: f64| {
                    u[i] = t;
                    touch.iter().map(|&e| self.rhs_term(u, e)).sum::<f64>()
                };
                let base_rhs = rhs - local(&mut u, old);
                let base_lhs = lhs - self.lhs_w[i] * old.powf(self.q);
                let mut phi = |t: f64| {
                    let r = base_rhs + local(&mut u, t);
                    let l = base_lhs + self.lhs_w[i] * t.powf(self.q);
                    (log_ratio(l, r), l, r)
                };
                let keep = phi(old);
                let hi = (2.0 * top).max(4.0 * old).max(f64::MIN_POSITIVE);
                let mut best = keep;
                let mut best_t = old;
                for t in [0.0, golden_max(|t| phi(t).0, 0.0, hi)] {
                    let c = phi(t);
                    if c.0 > best.0 {
                        best = c;
                        best_t = t;
                    }
                }
                u[i] = best_t;
                (_, lhs, rhs) = best;
            }
            let (l, r) = self.sides(&u);
            let scale = r.powf(-1.0 / self.p);
            u.iter_mut().for_each(|v| *v *= scale);
            (lhs, rhs) = (l * scale.powf(self.q), 1.0);
            let next = log_ratio(lhs, rhs);
            trace.push(TraceRow { iteration: sweep + 1, kappa: next.exp(), lhs, rhs });
            let gain = next - current;
            current = next;
            if gain < 1e-4 {
                break;
            }
        }
        (u, trace)
    }
}

fn pow_or_one(d: f64, gamma: f64) -> f64 {
    if gamma == 0.0 {
        1.0
    } else {
        d.powf(gamma)
    }
}

/// Multi-index of linear index `i` on a grid with `m` cells per axis, shifted by `-offset`.
fn unravel(mut i: usize, m: usize, n: usize, offset: i64) -> Vec<i64> {
    let mut idx = vec![0i64; n];
    for v in idx.iter_mut() {
        *v = (i % m) as i64 - offset;
        i /= m;
    }
    idx
}

fn golden_max(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..48 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn grid_ascent(
    set: &SetHandle,
    params: &HardyParams,
    budget: usize,
    seed: u64,
    cfg: &OptimizeConfig,
) -> Result<ConstantEstimate> {
    let bounds = cfg.bounds.clone().unwrap_or_else(|| default_box(set));
    let prob = DiscreteProblem::new(set, params, &bounds, cfg.grid)?;
    let members = family_members(set, params, seed);
    let family_start = members
        .iter()
        .map(|f| prob.realize(f))
        .filter_map(|u| prob.ratio(&u).filter(|k| k.is_finite()).map(|k| (k, u)))
        .max_by(|a, b| a.0.total_cmp(&b.0));
    let mut starts: Vec<Vec<f64>> = family_start.into_iter().map(|(_, u)| u).collect();
    for s in 0..cfg.starts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(s as u64 + 1)));
        starts.push((0..prob.cells()).map(|_| rng.gen::<f64>()).collect());
    }
    let runs: Vec<(Vec<f64>, Vec<TraceRow>)> = starts.par_iter().map(|u0| prob.ascend(u0, budget)).collect();
    let (u, trace) = runs
        .into_iter()
        .filter(|(u, _)| prob.ratio(u).is_some())
        .max_by(|a, b| prob.ratio(&a.0).unwrap().total_cmp(&prob.ratio(&b.0).unwrap()))
        .ok_or_else(|| Error::InvalidArgument("no ascent start has a nonzero gradient".into()))?;
    let (lhs, rhs) = prob.sides(&u);
    let ratio = prob.ratio(&u);
    let best = SideValues {
        label: format!("grid-ascent(m={},h={:e})", prob.m, prob.h),
        lhs,
        rhs,
        lhs_root: lhs.powf(1.0 / params.q),
        rhs_root: rhs.powf(1.0 / params.p),
        ratio,
        lhs_error: 0.0,
        rhs_error: 0.0,
        method: EvalMethod::Grid,
        flags: params.warnings(),
    };
    Ok(ConstantEstimate { strategy: Strategy::GridAscent, best, trace, skipped: Vec::new() })
}

/// Best lower bound for `κ` found within `budget`: family members evaluated for
/// `FamilySweep`, sweeps per start for `GridAscent`.
pub fn estimate_constant(
    set: &SetHandle,
    params: &HardyParams,
    strategy: Strategy,
    budget: usize,
    seed: u64,
) -> Result<ConstantEstimate> {
    estimate_constant_with(set, params, strategy, budget, seed, &OptimizeConfig::default())
}

pub fn estimate_constant_with(
    set: &SetHandle,
    params: &HardyParams,
    strategy: Strategy,
    budget: usize,
    seed: u64,
    cfg: &OptimizeConfig,
) -> Result<ConstantEstimate> {
    if params.n != set.dim() {
        return Err(Error::DimensionMismatch { expected: set.dim(), got: params.n });
    }
    match strategy {
        Strategy::FamilySweep => family_sweep(set, params, budget, seed, &cfg.eval),
        Strategy::GridAscent => grid_ascent(set, params, budget, seed, cfg),
    }
}
