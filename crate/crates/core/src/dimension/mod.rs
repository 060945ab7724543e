//! Covering numbers and estimators for Assouad, Minkowski and Hausdorff-content
//! dimensions, plus a porosity search.
//!
//! Covering numbers are replaced by greedy `2r`-separated nets over points of `E`:
//! a maximal `2r`-separated set has between `N(·, 2r)` and `N(·, r)` elements, which
//! moves log-log intercepts but not slopes.

mod net;
mod porosity;

use net::cell_key;
pub use net::{greedy_net, greedy_net_refs};
pub use porosity::{porosity_check, PorosityConfig, PorosityReport};

use crate::geom::{dist2, Bounds};
use crate::regress::{fit_line, window_fits, LineFit};
use crate::setmodel::SetHandle;
use crate::{Error, Result};
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::io::Write;

/// Default tolerance for dimension comparisons.
pub const DEFAULT_TOL: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DimKind {
    AssouadUpper,
    AssouadLower,
    MinkowskiUpper,
    MinkowskiLower,
}

/// Counts `log₂ N̂` against the scale index `k` (`r = R·2^{-k}`) for one `(x, R)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountProfile {
    pub center: Vec<f64>,
    pub big_r: f64,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimEstimate {
    pub value: f64,
    pub kind: DimKind,
    pub scale_window: (f64, f64),
    /// RMS residual of the winning fit.
    pub slope_residual: f64,
    /// Number of `(x, R, r)` triples (or box counts) that entered the fits.
    pub n_samples: usize,
    /// Center and outer radius of the winning fit (Assouad estimates).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(Vec<f64>, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profiles: Vec<CountProfile>,
}

impl DimEstimate {
    /// CSV rows `profile,center…,R,k,log2N`.
    pub fn write_profiles_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "profile,center,R,k,log2N")?;
        for (i, p) in self.profiles.iter().enumerate() {
            let c: Vec<String> = p.center.iter().map(|v| v.to_string()).collect();
            for (k, l) in &p.points {
                writeln!(w, "{i},{},{},{k},{l}", c.join(" "), p.big_r)?;
            }
        }
        Ok(())
    }
}

fn mesh_for(set: &SetHandle, r: f64) -> f64 {
    (0.25 * r).max(set.mesh())
}

/// Size of a greedy `2r`-separated net over `E ∩ B(center, R)`.
pub fn covering_number(set: &SetHandle, center: &[f64], big_r: f64, r: f64) -> Result<usize> {
    if !(r > 0.0 && r < big_r) {
        return Err(Error::InvalidArgument("covering number needs 0 < r < R".into()));
    }
    if center.len() != set.dim() {
        return Err(Error::DimensionMismatch { expected: set.dim(), got: center.len() });
    }
    let pts = set.sample_ball(center, big_r, mesh_for(set, r));
    if pts.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    Ok(greedy_net(&pts, 2.0 * r).len())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssouadConfig {
    /// Number of centers `x ∈ E`, chosen by farthest-point sampling.
    pub centers: usize,
    /// Number of outer radii `R_j = R_max·2^{-j·r_step}`, `j = 0..r_levels`.
    pub r_levels: usize,
    pub r_step: f64,
    /// Largest outer radius; defaults to `diam(E)/2`, or a quarter of the window side
    /// for unbounded sets.
    pub r_max: Option<f64>,
    /// Scale indices `k` with `r = R·2^{-k}`.
    pub k_min: usize,
    pub k_max: usize,
    /// Scales per octave.
    pub substeps: usize,
    /// Fit window width in octaves (at least 4).
    pub window: usize,
    /// Rounds of zooming into the profiles with the extreme slopes.
    pub zoom_rounds: usize,
    /// New centers per zoomed profile, its own center included.
    pub zoom_children: usize,
    /// Sample points allowed per ball; lowers `k_max` (never below `k_min + 4`).
    pub point_budget: usize,
    pub seed: u64,
}

impl Default for AssouadConfig {
    fn default() -> Self {
        Self {
            centers: 8,
            r_levels: 3,
            r_step: 2.0,
            r_max: None,
            k_min: 3,
            k_max: 12,
            substeps: 2,
            window: 9,
            zoom_rounds: 6,
            zoom_children: 4,
            point_budget: 1 << 19,
            seed: 0,
        }
    }
}

struct Scored {
    profile: CountProfile,
    hi: (f64, LineFit, (f64, f64)),
    lo: (f64, LineFit, (f64, f64)),
}

/// Upper and lower Assouad estimates: the max and min, over sampled `(x, R)` and
/// over `window`-octave windows of `k`, of the least-squares slope of `log₂ N̂(k)`.
///
/// `N̂(k)` counts the centers of a greedy `2r`-net of `E ∩ B(x, R + 2r)` that fall in
/// `B(x, R)`, which removes the excess density greedy nets acquire at a ball's edge.
/// Farthest-point centers and a geometric ladder of `R` seed the search; each zoom
/// round then replaces the current extreme profiles' balls by balls `R·2^{-r_step}`
/// centered at a spread of points inside them.
pub fn estimate_assouad(set: &SetHandle, cfg: &AssouadConfig) -> Result<(DimEstimate, DimEstimate)> {
    if cfg.window < 4 || cfg.k_max < cfg.k_min + 4 || cfg.substeps == 0 {
        return Err(Error::InsufficientScales(format!(
            "k range {}..={} cannot hold a 4-octave window",
            cfg.k_min, cfg.k_max
        )));
    }
    let r_max =
        cfg.r_max.unwrap_or_else(|| if set.bounded() { 0.5 * set.diameter() } else { 0.25 * set.window().max_side() });
    let centers = set.sample_points(cfg.centers.max(1), cfg.seed);
    if centers.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    let k_max = budget_k_max(set, &centers[0], r_max, cfg);
    let fits_scales = |big_r: f64| big_r * 2f64.powi(-(k_max as i32)) >= 4.0 * set.mesh();
    let radii: Vec<f64> = (0..cfg.r_levels.max(1))
        .map(|j| r_max * 2f64.powf(-(j as f64) * cfg.r_step))
        .filter(|&big_r| fits_scales(big_r))
        .collect();
    if radii.is_empty() {
        return Err(Error::InsufficientScales(format!(
            "smallest scale falls below 4× the sampling mesh {}",
            set.mesh()
        )));
    }
    let width = cfg.window.min(k_max - cfg.k_min) * cfg.substeps + 1;
    let run = |tasks: Vec<(Vec<f64>, f64)>| -> Vec<Scored> {
        tasks
            .par_iter()
            .map(|(x, big_r)| score(count_profile(set, x, *big_r, cfg.k_min, k_max, cfg.substeps), width))
            .collect()
    };
    let mut scored = run(centers.iter().flat_map(|c| radii.iter().map(move |&r| (c.clone(), r))).collect());
    // Only profiles from the previous round may be zoomed, so a side stops once its
    // extreme no longer improves.
    let mut fresh = 0;
    for round in 0..cfg.zoom_rounds {
        let hi = extreme(&scored, true);
        let lo = extreme(&scored, false);
        let mut parents: Vec<usize> = vec![hi, lo];
        parents.dedup();
        parents.retain(|&i| i >= fresh);
        fresh = scored.len();
        let mut tasks = Vec::new();
        for (side, &pi) in parents.iter().enumerate() {
            let p = &scored[pi].profile;
            let child_r = p.big_r * 2f64.powf(-cfg.r_step);
            if !fits_scales(child_r) {
                continue;
            }
            let seed = cfg.seed.wrapping_add(1 + 2 * round as u64 + side as u64);
            for c in zoom_centers(set, &p.center, p.big_r, child_r, cfg.zoom_children, seed) {
                tasks.push((c, child_r));
            }
        }
        if tasks.is_empty() {
            break;
        }
        scored.extend(run(tasks));
    }
    let n = set.dim() as f64;
    let triples = scored.iter().map(|s| s.profile.points.len()).sum();
    let make = |i: usize, hi: bool| {
        let s = &scored[i];
        let (slope, fit, win) = if hi { &s.hi } else { &s.lo };
        DimEstimate {
            value: slope.clamp(0.0, n),
            kind: if hi { DimKind::AssouadUpper } else { DimKind::AssouadLower },
            scale_window: *win,
            slope_residual: fit.residual,
            n_samples: triples,
            witness: Some((s.profile.center.clone(), s.profile.big_r)),
            profiles: Vec::new(),
        }
    };
    let mut upper = make(extreme(&scored, true), true);
    let lower = make(extreme(&scored, false), false);
    upper.profiles = scored.into_iter().map(|s| s.profile).collect();
    Ok((upper, lower))
}

/// Largest `k ≤ k_max` whose predicted ball sample stays within the point budget,
/// extrapolated from two coarse samples.
fn budget_k_max(set: &SetHandle, x: &[f64], big_r: f64, cfg: &AssouadConfig) -> usize {
    let floor = cfg.k_min + 4;
    let outer = big_r * (1.0 + 2.0 * 2f64.powi(-(cfg.k_min as i32)));
    let count = |k: usize| set.sample_ball(x, outer, (big_r * 2f64.powi(-(k as i32))).max(set.mesh())).len().max(1);
    let (ka, kb) = (cfg.k_min + 2, cfg.k_min + 3);
    let (na, nb) = (count(ka), count(kb));
    let growth = (nb as f64 / na as f64).max(1.0);
    let mut k = kb;
    while k < cfg.k_max && nb as f64 * growth.powi((k + 1 - kb) as i32) <= cfg.point_budget as f64 {
        k += 1;
    }
    k.max(floor).min(cfg.k_max)
}

/// `parent` plus farthest-point picks from a `child_r`-net of `E ∩ B(parent, R)`.
fn zoom_centers(set: &SetHandle, parent: &[f64], big_r: f64, child_r: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let pts = set.sample_ball(parent, big_r, (0.25 * child_r).max(set.mesh()));
    let net: Vec<Vec<f64>> = greedy_net(&pts, child_r).into_iter().map(|i| pts[i].clone()).collect();
    let mut out = vec![parent.to_vec()];
    for c in crate::setmodel::farthest_point_sample(&net, count.saturating_sub(1), seed) {
        if dist2(&c, parent) > 0.0 {
            out.push(c);
        }
    }
    out
}

fn extreme(scored: &[Scored], hi: bool) -> usize {
    let mut best = 0;
    for (i, s) in scored.iter().enumerate() {
        let better = if hi { s.hi.0 > scored[best].hi.0 } else { s.lo.0 < scored[best].lo.0 };
        if better {
            best = i;
        }
    }
    best
}

fn score(profile: CountProfile, width: usize) -> Scored {
    let mut hi: Option<(f64, LineFit, (f64, f64))> = None;
    let mut lo: Option<(f64, LineFit, (f64, f64))> = None;
    for (s, fit) in window_fits(&profile.points, width) {
        let k0 = profile.points[s].0;
        let k1 = profile.points[s + width - 1].0;
        let win = (profile.big_r * 2f64.powf(-k1), profile.big_r * 2f64.powf(-k0));
        if hi.as_ref().is_none_or(|b| fit.slope > b.0) {
            hi = Some((fit.slope, fit, win));
        }
        if lo.as_ref().is_none_or(|b| fit.slope < b.0) {
            lo = Some((fit.slope, fit, win));
        }
    }
    Scored { profile, hi: hi.expect("at least one window"), lo: lo.expect("at least one window") }
}

fn count_profile(set: &SetHandle, x: &[f64], big_r: f64, k_min: usize, k_max: usize, substeps: usize) -> CountProfile {
    let steps: Vec<f64> = (k_min * substeps..=k_max * substeps).map(|i| i as f64 / substeps as f64).collect();
    let r_of = |k: f64| big_r * 2f64.powf(-k);
    let outer = big_r + 2.0 * r_of(steps[0]);
    // Analytic samples lie on E, so a mesh of 2·r_min keeps every net center on E and
    // every point of E within 4r of one.
    let pts = set.sample_ball(x, outer, (2.0 * r_of(*steps.last().unwrap())).max(set.mesh()));
    let big_r2 = big_r * big_r;
    let points = steps
        .iter()
        .map(|&k| {
            let r = r_of(k);
            let lim = (big_r + 2.0 * r).powi(2);
            // One sample per grid cell of side r/2 keeps the net input near its output size.
            let mut seen = FxHashSet::default();
            let local: Vec<&[f64]> = pts
                .iter()
                .filter(|p| dist2(p, x) <= lim && seen.insert(cell_key(p, 0.5 * r)))
                .map(Vec::as_slice)
                .collect();
            let net = greedy_net_refs(&local, 2.0 * r);
            let inside = net.iter().filter(|&&i| dist2(local[i], x) <= big_r2).count().max(1);
            (k, (inside as f64).log2())
        })
        .collect();
    CountProfile { center: x.to_vec(), big_r, points }
}

pub fn estimate_assouad_upper(set: &SetHandle, cfg: &AssouadConfig) -> Result<DimEstimate> {
    estimate_assouad(set, cfg).map(|p| p.0)
}

pub fn estimate_assouad_lower(set: &SetHandle, cfg: &AssouadConfig) -> Result<DimEstimate> {
    estimate_assouad(set, cfg).map(|p| p.1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiConfig {
    pub k_min: usize,
    pub k_max: usize,
    /// Fit window width in octaves (at least 4).
    pub window: usize,
}

impl Default for MinkowskiConfig {
    fn default() -> Self {
        Self { k_min: 3, k_max: 12, window: 6 }
    }
}

/// Dyadic box counts `N_k` (cells of side `2^{-k}` anchored at the box's lower corner
/// that contain points of `E ∩ box`), with upper/lower estimates the max/min
/// window slope of `log₂ N_k` against `k`.
pub fn estimate_minkowski(
    set: &SetHandle,
    bounds: &Bounds,
    cfg: &MinkowskiConfig,
) -> Result<(DimEstimate, DimEstimate)> {
    if cfg.window < 4 || cfg.k_max < cfg.k_min + cfg.window {
        return Err(Error::InsufficientScales(format!(
            "k range {}..={} cannot hold a {}-octave window",
            cfg.k_min, cfg.k_max, cfg.window
        )));
    }
    let finest = 2f64.powi(-(cfg.k_max as i32));
    if finest < 4.0 * set.mesh() {
        return Err(Error::InsufficientScales(format!(
            "box side 2^-{} is below 4× the sampling mesh {}",
            cfg.k_max,
            set.mesh()
        )));
    }
    let pts = set.sample_region(bounds, 0.25 * finest);
    if pts.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    let counts: Vec<(f64, f64)> = (cfg.k_min..=cfg.k_max)
        .into_par_iter()
        .map(|k| {
            let side = 2f64.powi(-(k as i32));
            let cells: HashSet<Vec<i64>> = pts
                .iter()
                .map(|p| p.iter().zip(&bounds.lower).map(|(v, l)| ((v - l) / side).floor() as i64).collect())
                .collect();
            (k as f64, (cells.len() as f64).log2())
        })
        .collect();
    let fits = window_fits(&counts, cfg.window + 1);
    let n = set.dim() as f64;
    let pick = |hi: bool, kind| {
        let (s, fit) = fits
            .iter()
            .copied()
            .reduce(|a, b| if (b.1.slope > a.1.slope) == hi { b } else { a })
            .expect("at least one window");
        DimEstimate {
            value: fit.slope.clamp(0.0, n),
            kind,
            scale_window: (2f64.powf(-counts[s + cfg.window].0), 2f64.powf(-counts[s].0)),
            slope_residual: fit.residual,
            n_samples: counts.len(),
            witness: None,
            profiles: vec![CountProfile { center: bounds.lower.clone(), big_r: 1.0, points: counts.clone() }],
        }
    };
    Ok((pick(true, DimKind::MinkowskiUpper), pick(false, DimKind::MinkowskiLower)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentEstimate {
    pub lambda: f64,
    pub bound: f64,
    pub radii: Vec<f64>,
}

/// Upper bound `Σ rᵢ^λ` on the Hausdorff content of `E ∩ box` from a greedy cover by
/// balls of radius `scale`.
pub fn content_upper(set: &SetHandle, lambda: f64, bounds: &Bounds, scale: f64) -> Result<ContentEstimate> {
    let n = set.dim() as f64;
    if !(0.0..=n).contains(&lambda) || scale <= 0.0 {
        return Err(Error::InvalidArgument("content needs 0 ≤ λ ≤ n and scale > 0".into()));
    }
    // Samples are within `mesh` of E, so `scale - mesh` separation still covers E.
    let mesh = (scale / 8.0).max(set.mesh());
    if mesh >= scale {
        return Err(Error::InsufficientScales("cover radius below the sampling mesh".into()));
    }
    let pts = set.sample_region(bounds, mesh);
    let count = greedy_net(&pts, scale - mesh).len();
    Ok(ContentEstimate { lambda, bound: count as f64 * scale.powf(lambda), radii: vec![scale; count] })
}

/// Fit of the content bounds against the scales, used to report a decreasing sequence.
pub fn content_trend(estimates: &[ContentEstimate]) -> Option<LineFit> {
    let pts: Vec<(f64, f64)> = estimates
        .iter()
        .filter(|e| e.bound > 0.0 && !e.radii.is_empty())
        .map(|e| (e.radii[0].log2(), e.bound.log2()))
        .collect();
    fit_line(&pts)
}
