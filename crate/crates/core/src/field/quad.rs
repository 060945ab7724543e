//! Midpoint quadrature of `|f|^power · δ_E^γ` with recursive subdivision near `E`.

use super::GridField;
use crate::geom::{dist2, pairwise_sum, Region};
use crate::setmodel::{SetHandle, MAX_DIM};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicUsize, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Top-level cells along the longest side of the region's bounding box.
    pub resolution: usize,
    /// Subdivision levels below the top grid.
    pub max_subdiv: usize,
    /// Maximum number of cell evaluations.
    pub cell_cap: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { resolution: 32, max_subdiv: 6, cell_cap: 1 << 28 }
    }
}

impl QuadConfig {
    pub fn new(resolution: usize, max_subdiv: usize) -> Self {
        Self { resolution, max_subdiv, ..Self::default() }
    }
}

/// Non-weight factor of the integrand.
#[derive(Clone, Copy)]
pub enum Integrand<'a> {
    One,
    /// Cell-center samples, interpolated multilinearly at sub-cell centers.
    Grid(&'a GridField),
    Func(&'a (dyn Fn(&[f64]) -> f64 + Sync)),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    /// Contribution of the deepest level; small when subdivision has resolved `E`.
    pub error_indicator: f64,
    /// Contribution of cells finalized at each subdivision level.
    pub level_sums: Vec<f64>,
    /// Slope of `log₂(level sum)` against level over the deep levels, if measurable.
    pub tail_slope: Option<f64>,
    /// The level sums do not decay: the integral is not finite.
    pub diverging: bool,
    /// Some cell at the deepest level may contain points of `E`.
    pub touches: bool,
    pub cells: usize,
}

/// Tail slopes above this mark a non-decaying (divergent) level profile.
pub const DIVERGENCE_SLOPE: f64 = -0.05;

/// `∫_region |f|^power · δ_E^γ dx`.
///
/// Top-level cells of side `h = max side / resolution` cover the region's bounding box;
/// when `γ < 0` a cell whose center has `δ < 2·side` is split into `2ⁿ` children, up to
/// `max_subdiv` levels. Cells cut by a ball boundary are weighted by the fraction of a
/// sub-sample of points falling inside. A cell whose center lies on `E` contributes 0
/// at the deepest level. Per-cell partial sums are reduced pairwise in a fixed order,
/// so the result does not depend on the thread count.
pub fn integrate_weighted(
    set: &SetHandle,
    region: &Region,
    gamma: f64,
    integrand: Integrand<'_>,
    power: f64,
    cfg: &QuadConfig,
) -> Result<Integral> {
    let n = set.dim();
    if region.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: region.dim() });
    }
    if cfg.resolution < 1 {
        return Err(Error::InvalidArgument("resolution must be ≥ 1".into()));
    }
    let bbox = region.bounding_box();
    let h = bbox.max_side() / cfg.resolution as f64;
    let res: Vec<usize> = (0..n).map(|i| ((bbox.side(i) / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize).collect();
    let top: usize = res.iter().product();
    if top > cfg.cell_cap {
        return Err(Error::BudgetExceeded { requested: top, cap: cfg.cell_cap });
    }
    let levels = cfg.max_subdiv + 1;
    let counter = AtomicUsize::new(0);
    let ctx = Ctx {
        set,
        region,
        gamma,
        integrand,
        power,
        max_level: cfg.max_subdiv,
        refine: gamma < 0.0,
        counter: &counter,
        cap: cfg.cell_cap,
    };
    let partial: Vec<(Vec<f64>, bool, bool)> = (0..top)
        .into_par_iter()
        .map(|flat| {
            let mut c = [0.0; MAX_DIM];
            let mut rest = flat;
            for a in (0..n).rev() {
                let i = rest % res[a];
                rest /= res[a];
                c[a] = bbox.lower[a] + (i as f64 + 0.5) * h;
            }
            let mut sums = vec![0.0; levels];
            let mut touch = false;
            let ok = ctx.cell(&c[..n], h, 0, &mut sums, &mut touch);
            (sums, touch, ok)
        })
        .collect();
    if partial.iter().any(|p| !p.2) {
        return Err(Error::BudgetExceeded { requested: counter.load(Ordering::Relaxed), cap: cfg.cell_cap });
    }
    let touches = partial.iter().any(|p| p.1);
    if touches && gamma <= -(n as f64) {
        return Err(Error::Divergent(format!("weight exponent {gamma} ≤ -{n} on a region meeting the set")));
    }
    let level_sums: Vec<f64> =
        (0..levels).map(|l| pairwise_sum(&partial.iter().map(|p| p.0[l]).collect::<Vec<_>>())).collect();
    let value = pairwise_sum(&level_sums);
    // The deepest level holds every unresolved cell near E, not a single shell.
    let tail_slope = if gamma < 0.0 { tail_slope(&level_sums[..levels - 1]) } else { None };
    Ok(Integral {
        value,
        error_indicator: *level_sums.last().unwrap(),
        diverging: touches && tail_slope.is_some_and(|s| s > DIVERGENCE_SLOPE),
        tail_slope,
        level_sums,
        touches,
        cells: counter.load(Ordering::Relaxed),
    })
}

/// Least-squares slope of `log₂ S_k` over levels `k ≥ 2` with `S_k > 0`; needs three
/// such levels.
pub fn tail_slope(level_sums: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        level_sums.iter().enumerate().skip(2).filter(|(_, &s)| s > 0.0).map(|(k, s)| (k as f64, s.log2())).collect();
    if pts.len() < 3 {
        return None;
    }
    crate::regress::fit_line(&pts).map(|f| f.slope)
}

struct Ctx<'a> {
    set: &'a SetHandle,
    region: &'a Region,
    gamma: f64,
    integrand: Integrand<'a>,
    power: f64,
    max_level: usize,
    refine: bool,
    counter: &'a AtomicUsize,
    cap: usize,
}

impl Ctx<'_> {
    /// Adds the cell's contribution into `sums`; false once the cell cap is hit.
    fn cell(&self, c: &[f64], side: f64, level: usize, sums: &mut [f64], touch: &mut bool) -> bool {
        if self.counter.fetch_add(1, Ordering::Relaxed) >= self.cap {
            return false;
        }
        let n = c.len();
        let frac = self.fraction(c, side);
        if frac == 0.0 {
            return true;
        }
        let d = self.set.dist(c);
        if self.refine && d < 2.0 * side && level < self.max_level {
            let half = 0.5 * side;
            let mut child = [0.0; MAX_DIM];
            for mask in 0..1usize << n {
                for a in 0..n {
                    child[a] = c[a] + if mask >> a & 1 == 1 { 0.5 * half } else { -0.5 * half };
                }
                if !self.cell(&child[..n], half, level + 1, sums, touch) {
                    return false;
                }
            }
            return true;
        }
        if level == self.max_level && d <= 0.5 * side * (n as f64).sqrt() * (1.0 + 1e-12) + self.set.mesh() {
            *touch = true;
        }
        let w = if self.gamma == 0.0 {
            1.0
        } else if d == 0.0 {
            if self.gamma > 0.0 {
                0.0
            } else {
                return true;
            }
        } else {
            d.powf(self.gamma)
        };
        let f = match self.integrand {
            Integrand::One => 1.0,
            Integrand::Grid(g) => g.interpolate(c),
            Integrand::Func(f) => f(c),
        };
        let fp = if f == 0.0 {
            0.0
        } else if self.power == 1.0 {
            f.abs()
        } else {
            f.abs().powf(self.power)
        };
        sums[level] += frac * fp * w * side.powi(n as i32);
        true
    }

    /// Fraction of the cell inside the region.
    fn fraction(&self, c: &[f64], side: f64) -> f64 {
        match self.region {
            Region::Box(b) => {
                let mut f = 1.0;
                for a in 0..c.len() {
                    let lo = (c[a] - 0.5 * side).max(b.lower[a]);
                    let hi = (c[a] + 0.5 * side).min(b.upper[a]);
                    f *= ((hi - lo) / side).max(0.0);
                }
                f
            }
            Region::Ball { center, radius } => {
                let n = c.len();
                let r = dist2(c, center).sqrt();
                let half_diag = 0.5 * side * (n as f64).sqrt();
                if r + half_diag <= *radius {
                    return 1.0;
                }
                if r - half_diag >= *radius {
                    return 0.0;
                }
                let k: usize = if n <= 3 { 4 } else { 2 };
                let total = k.pow(n as u32);
                let r2 = radius * radius;
                let mut inside = 0;
                let mut p = [0.0; MAX_DIM];
                for idx in 0..total {
                    let mut rest = idx;
                    for a in 0..n {
                        let i = rest % k;
                        rest /= k;
                        p[a] = c[a] - 0.5 * side + (i as f64 + 0.5) * side / k as f64;
                    }
                    if dist2(&p[..n], center) < r2 {
                        inside += 1;
                    }
                }
                inside as f64 / total as f64
            }
        }
    }
}
