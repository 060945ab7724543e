//! Sampled checks of the Aikawa condition, the P(s) property, the comparability of
//! `∫_B δ^{s−n}` with `diam(B)^n (diam(B) + dist(B,E))^{s−n}`, and the A₁ property of
//! `δ^{s−n}`.
//!
//! A constant counts as bounded when its profile over at least four dyadic scales has a
//! fitted log-log growth slope at most `slope_tol`.

use crate::dimension::{porosity_check, PorosityConfig};
use crate::field::{integrate_weighted, Integrand, QuadConfig};
use crate::geom::{dist, Region};
use crate::regress::fit_line;
use crate::setmodel::{SetHandle, MAX_DIM};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    Aikawa,
    Ps,
    Equiv,
    A1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Witness {
    Ball { center: Vec<f64>, radius: f64 },
    Shell { center: Vec<f64>, radius: f64, eta1: f64, eta2: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub s: f64,
    pub verdict: Outcome,
    /// `(scale, largest observed constant at that scale)`, coarse to fine.
    pub constant_profile: Vec<(f64, f64)>,
    /// Slope of `log₂ constant` against `log₂(1/scale)`, over scales at most `diam(E)/2`.
    pub trend_slope: Option<f64>,
    pub max_constant: Option<f64>,
    /// Some ball or shell where the integral diverged.
    pub divergent: bool,
    pub worst_witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ConditionReport {
    fn inconclusive(condition: Condition, s: f64, note: String) -> Self {
        Self {
            condition,
            s,
            verdict: Outcome::Inconclusive,
            constant_profile: Vec::new(),
            trend_slope: None,
            max_constant: None,
            divergent: false,
            worst_witness: None,
            notes: vec![note],
        }
    }

    /// CSV rows `log2_scale,log2_constant`.
    pub fn profile_csv(&self) -> String {
        let mut s = String::from("log2_scale,log2_constant\n");
        for (r, c) in &self.constant_profile {
            s += &format!("{},{}\n", r.log2(), c.log2());
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    /// Ball centers sampled on `E`.
    pub centers: usize,
    /// Dyadic scales in the constant profile (at least 4).
    pub scales: usize,
    /// Largest radius; defaults to `diam(E)/2`, or a quarter of the window side.
    pub r_max: Option<f64>,
    /// Top-level quadrature cells across a ball.
    pub resolution: usize,
    pub max_subdiv: usize,
    /// `η₁` choices per `η₂` for P(s), from `0, η₂/2, 3η₂/4, 7η₂/8`.
    pub eta_pairs: usize,
    pub slope_tol: f64,
    /// Known or estimated `dim_A(E)`, used as the comparability precondition.
    pub dim_a: Option<f64>,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            centers: 4,
            scales: 5,
            r_max: None,
            resolution: 12,
            max_subdiv: 5,
            eta_pairs: 3,
            slope_tol: 0.1,
            dim_a: None,
            seed: 0,
        }
    }
}

impl CheckConfig {
    fn r_max(&self, set: &SetHandle) -> f64 {
        self.r_max.unwrap_or_else(|| {
            if set.bounded() && set.diameter() > 0.0 {
                0.5 * set.diameter()
            } else {
                0.25 * set.window().max_side()
            }
        })
    }

    /// Dyadic radii from `r_max` down. For compact `E`, radii above `diam(E)/2` only
    /// see `E` from outside, so `scales` radii are kept below that and the trend is fitted
    /// there. Returns the radii and the largest radius entering the fit.
    fn radii(&self, set: &SetHandle) -> (Vec<f64>, f64) {
        let top = self.r_max(set);
        let cap = if set.bounded() && set.diameter() > 0.0 { 0.5 * set.diameter() } else { f64::INFINITY };
        let mut radii = Vec::new();
        let mut below = 0;
        let mut r = top;
        while below < self.scales {
            if r <= cap * (1.0 + 1e-9) {
                below += 1;
            }
            radii.push(r);
            r *= 0.5;
        }
        (radii, cap.min(top))
    }

    fn validate(&self) -> Result<()> {
        if self.scales < 4 {
            return Err(Error::InsufficientScales(format!("{} scales, need 4", self.scales)));
        }
        if self.centers == 0 || self.resolution == 0 {
            return Err(Error::InvalidArgument("need at least one center and one cell".into()));
        }
        Ok(())
    }
}

fn trend(profile: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = profile
        .iter()
        .filter(|(r, c)| *r > 0.0 && *c > 0.0 && c.is_finite())
        .map(|(r, c)| (-r.log2(), c.log2()))
        .collect();
    if pts.len() < 4 {
        return None;
    }
    fit_line(&pts).map(|f| f.slope)
}

/// Per-sample result: scale index, constant, witness.
type Sample = (usize, Result<f64>, Witness);

/// Folds samples into a report: divergence fails, otherwise the trend decides.
fn conclude(
    condition: Condition,
    s: f64,
    scales: &[f64],
    fit_max: f64,
    samples: Vec<Sample>,
    tol: f64,
) -> Result<ConditionReport> {
    let mut best: Vec<Option<(f64, Witness)>> = vec![None; scales.len()];
    let mut divergent = None;
    for (j, c, w) in samples {
        match c {
            Ok(c) => {
                if best[j].as_ref().is_none_or(|b| c > b.0) {
                    best[j] = Some((c, w));
                }
            }
            Err(Error::Divergent(_)) => {
                divergent.get_or_insert(w);
            }
            Err(e) => return Err(e),
        }
    }
    let constant_profile: Vec<(f64, f64)> =
        scales.iter().zip(&best).filter_map(|(r, b)| b.as_ref().map(|b| (*r, b.0))).collect();
    let worst = best.iter().flatten().max_by(|a, b| a.0.total_cmp(&b.0));
    let max_constant = worst.map(|w| w.0);
    let fitted: Vec<(f64, f64)> = constant_profile.iter().copied().filter(|p| p.0 <= fit_max * (1.0 + 1e-9)).collect();
    let trend_slope = trend(&fitted);
    let is_divergent = divergent.is_some();
    let verdict = match (&divergent, trend_slope) {
        (Some(_), _) => Outcome::Fail,
        (None, None) => Outcome::Inconclusive,
        (None, Some(t)) if t <= tol && max_constant.is_some_and(f64::is_finite) => Outcome::Pass,
        _ => Outcome::Fail,
    };
    let worst_witness = divergent.or_else(|| worst.map(|w| w.1.clone()));
    Ok(ConditionReport {
        condition,
        s,
        verdict,
        constant_profile,
        trend_slope,
        max_constant,
        divergent: is_divergent,
        worst_witness,
        notes: Vec::new(),
    })
}

fn weighted(set: &SetHandle, center: &[f64], radius: f64, gamma: f64, cfg: &CheckConfig) -> Result<f64> {
    let q = QuadConfig::new(cfg.resolution, cfg.max_subdiv);
    let r = integrate_weighted(set, &Region::ball(center, radius), gamma, Integrand::One, 1.0, &q)?;
    if r.diverging {
        return Err(Error::Divergent(format!("level sums decay with slope {:.3}", r.tail_slope.unwrap_or(f64::NAN))));
    }
    Ok(r.value)
}

/// `C(x, r) = r^{−s} ∫_{B(x,r)} δ^{s−n}` over sampled `x ∈ E` and `r = r_max·2^{−j}`.
pub fn aikawa_check(set: &SetHandle, s: f64, cfg: &CheckConfig) -> Result<ConditionReport> {
    cfg.validate()?;
    if !(s > 0.0) {
        return Err(Error::InvalidArgument("Aikawa check needs s > 0".into()));
    }
    let n = set.dim() as f64;
    let centers = set.sample_points(cfg.centers, cfg.seed);
    let (radii, fit_max) = cfg.radii(set);
    let jobs: Vec<(usize, &Vec<f64>)> = (0..radii.len()).flat_map(|j| centers.iter().map(move |x| (j, x))).collect();
    let samples: Vec<Sample> = jobs
        .par_iter()
        .map(|&(j, x)| {
            let r = radii[j];
            let c = weighted(set, x, r, s - n, cfg).map(|v| v / r.powf(s));
            (j, c, Witness::Ball { center: x.clone(), radius: r })
        })
        .collect();
    conclude(Condition::Aikawa, s, &radii, fit_max, samples, cfg.slope_tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// Midpoint of the final bracket.
    pub value: f64,
    /// Largest failing and smallest passing exponent seen.
    pub fail_below: f64,
    pub pass_above: f64,
    pub evaluations: usize,
}

/// Bisects `s ∈ (0, n]` for the smallest exponent passing the Aikawa check, down to a
/// bracket of width `step`. `s = n` passes by assumption.
pub fn aikawa_threshold(set: &SetHandle, step: f64, cfg: &CheckConfig) -> Result<Threshold> {
    let (mut lo, mut hi) = (0.0, set.dim() as f64);
    let mut evaluations = 0;
    while hi - lo > step {
        let mid = 0.5 * (lo + hi);
        evaluations += 1;
        if aikawa_check(set, mid, cfg)?.verdict == Outcome::Pass {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Threshold { value: 0.5 * (lo + hi), fail_below: lo, pass_above: hi, evaluations })
}

/// `|B(x,ρ) ∩ {η₁ ≤ δ < η₂}|`: cells straddling a level set or the sphere are split
/// until their side drops below `min_side`. A leaf inside the ball counts the fraction
/// of `t ∈ [d − side/2, d + side/2]` with `η₁ ≤ |t| < η₂`, `d = δ(center)`, which is
/// exact when `E` is flat across the leaf.
pub fn shell_volume(set: &SetHandle, x: &[f64], rho: f64, eta1: f64, eta2: f64, min_side: f64) -> f64 {
    let n = x.len();
    let top = 8usize;
    let side = 2.0 * rho / top as f64;
    let cells = top.pow(n as u32);
    let parts: Vec<f64> = (0..cells)
        .into_par_iter()
        .map(|flat| {
            let mut c = [0.0; MAX_DIM];
            let mut rest = flat;
            for a in 0..n {
                c[a] = x[a] - rho + ((rest % top) as f64 + 0.5) * side;
                rest /= top;
            }
            shell_cell(set, x, rho, eta1, eta2, &c[..n], side, min_side)
        })
        .collect();
    crate::geom::pairwise_sum(&parts)
}

#[allow(clippy::too_many_arguments)]
fn shell_cell(set: &SetHandle, x: &[f64], rho: f64, e1: f64, e2: f64, c: &[f64], side: f64, min_side: f64) -> f64 {
    let n = c.len();
    let hd = 0.5 * side * (n as f64).sqrt();
    let rc = dist(c, x);
    if rc - hd >= rho {
        return 0.0;
    }
    let d = set.dist(c);
    if d - hd >= e2 || d + hd < e1 {
        return 0.0;
    }
    let vol = side.powi(n as i32);
    if rc + hd <= rho && d - hd >= e1 && d + hd < e2 {
        return vol;
    }
    if side <= min_side {
        if rc >= rho {
            return 0.0;
        }
        let (lo, hi) = (d - 0.5 * side, d + 0.5 * side);
        let overlap = |a: f64, b: f64| (hi.min(b) - lo.max(a)).max(0.0);
        return vol * (overlap(e1, e2) + overlap(-e2, -e1)) / side;
    }
    let half = 0.5 * side;
    let mut child = [0.0; MAX_DIM];
    let mut total = 0.0;
    for mask in 0..1usize << n {
        for a in 0..n {
            child[a] = c[a] + if mask >> a & 1 == 1 { 0.5 * half } else { -0.5 * half };
        }
        total += shell_cell(set, x, rho, e1, e2, &child[..n], half, min_side);
    }
    total
}

/// The P(s) constant `|B ∩ (E_{η₂} \ E_{η₁})| / bound` with bound
/// `η₂^{s−1}(η₂−η₁) diam(B)^{n−s}` for `s ≥ 1` and `(η₂−η₁)^s diam(B)^{n−s}` for `s < 1`,
/// profiled over `η₂/diam(B) = 2^{−k}`, `k ≥ 2`. At `k = 1` the ball truncates the
/// neighborhood and the constant is still rising toward its limit.
pub fn ps_check(set: &SetHandle, s: f64, cfg: &CheckConfig) -> Result<ConditionReport> {
    cfg.validate()?;
    let n = set.dim() as f64;
    if !(0.0..=n).contains(&s) {
        return Err(Error::InvalidArgument(format!("P(s) needs 0 ≤ s ≤ {n}")));
    }
    if set.hausdorff_dim().is_some_and(|d| d >= n) {
        return Ok(ConditionReport::inconclusive(Condition::Ps, s, "E has positive measure".into()));
    }
    let centers = set.sample_points(cfg.centers, cfg.seed);
    let r_max = cfg.r_max(set);
    let ratios: Vec<f64> = (2..=cfg.scales + 1).map(|k| 2f64.powi(-(k as i32))).collect();
    let fractions = [0.0, 0.5, 0.75, 0.875];
    let mut jobs = Vec::new();
    for (k, &ratio) in ratios.iter().enumerate() {
        for x in &centers {
            for b in 0..3 {
                for &f in fractions.iter().take(cfg.eta_pairs.max(1)) {
                    jobs.push((k, ratio, x, r_max * 2f64.powi(-b), f));
                }
            }
        }
    }
    let samples: Vec<Sample> = jobs
        .par_iter()
        .map(|&(k, ratio, x, rho, f)| {
            let diam = 2.0 * rho;
            let e2 = ratio * diam;
            let e1 = f * e2;
            let width = e2 - e1;
            let vol = shell_volume(set, x, rho, e1, e2, width);
            let bound =
                if s >= 1.0 { e2.powf(s - 1.0) * width * diam.powf(n - s) } else { width.powf(s) * diam.powf(n - s) };
            (k, Ok(vol / bound), Witness::Shell { center: x.clone(), radius: rho, eta1: e1, eta2: e2 })
        })
        .collect();
    conclude(Condition::Ps, s, &ratios, f64::INFINITY, samples, cfg.slope_tol)
}

/// Balls touching `E`, near it, and at least ten diameters away.
fn placements(set: &SetHandle, x: &[f64], rho: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    for a in 0..n {
        for sign in [1.0, -1.0] {
            let mut u = vec![0.0; n];
            u[a] = sign;
            let y: Vec<f64> = x.iter().zip(&u).map(|(p, v)| p + 2.0 * rho * v).collect();
            let d = set.dist(&y);
            if d > best.0 + 1e-12 {
                best = (d, u);
            }
        }
    }
    let u = best.1;
    let shift = |t: f64| x.iter().zip(&u).map(|(p, v)| p + t * rho * v).collect::<Vec<f64>>();
    vec![x.to_vec(), shift(2.0), shift(24.0)]
}

/// Ratio `∫_B δ^{s−n} / (diam(B)^n (diam(B) + dist(B,E))^{s−n})` over touching, near and
/// far balls. The profile holds `max(ratio, 1/ratio)` per scale.
pub fn equiv_check(set: &SetHandle, s: f64, cfg: &CheckConfig) -> Result<ConditionReport> {
    cfg.validate()?;
    if let Some(d) = cfg.dim_a {
        if s <= d {
            return Ok(ConditionReport::inconclusive(Condition::Equiv, s, format!("s = {s} ≤ dim_A estimate {d}")));
        }
    }
    let por = porosity_check(set, &PorosityConfig { seed: cfg.seed, ..Default::default() });
    if !por.porous {
        return Ok(ConditionReport::inconclusive(Condition::Equiv, s, format!("E not porous (c = {:.3})", por.c)));
    }
    let n = set.dim() as f64;
    let centers = set.sample_points(cfg.centers, cfg.seed);
    let (radii, fit_max) = cfg.radii(set);
    let mut jobs = Vec::new();
    for (j, &rho) in radii.iter().enumerate() {
        for x in &centers {
            for y in placements(set, x, rho) {
                jobs.push((j, rho, y));
            }
        }
    }
    let samples: Vec<Sample> = jobs
        .par_iter()
        .map(|(j, rho, y)| {
            let diam = 2.0 * rho;
            let gap = (set.dist(y) - rho).max(0.0);
            let rhs = diam.powf(n) * (diam + gap).powf(s - n);
            let c = weighted(set, y, *rho, s - n, cfg).map(|v| {
                let r = v / rhs;
                r.max(1.0 / r)
            });
            (*j, c, Witness::Ball { center: y.clone(), radius: *rho })
        })
        .collect();
    let mut report = conclude(Condition::Equiv, s, &radii, fit_max, samples, cfg.slope_tol)?;
    if report.divergent {
        report.verdict = Outcome::Inconclusive;
        report.notes.push("a touching ball diverges: s is at most dim_A".into());
    }
    if let Some(k) = report.max_constant {
        report.notes.push(format!("band [1/{k:.3}, {k:.3}]"));
    }
    Ok(report)
}

/// A₁ ratio `⨍_B ω / min ω` for `ω = δ^{s−n}`, with the minimum over the centers of the
/// top-level quadrature cells in `B`.
pub fn a1_check(set: &SetHandle, s: f64, cfg: &CheckConfig) -> Result<ConditionReport> {
    cfg.validate()?;
    let n = set.dim();
    let gamma = s - n as f64;
    let centers = set.sample_points(cfg.centers, cfg.seed);
    let (radii, fit_max) = cfg.radii(set);
    let mut jobs = Vec::new();
    for (j, &rho) in radii.iter().enumerate() {
        for x in &centers {
            for y in placements(set, x, rho).into_iter().take(2) {
                jobs.push((j, rho, y));
            }
        }
    }
    let samples: Vec<Sample> = jobs
        .par_iter()
        .map(|(j, rho, y)| {
            let c = (|| {
                let total = weighted(set, y, *rho, gamma, cfg)?;
                let vol = weighted(set, y, *rho, 0.0, cfg)?;
                let inf = cell_min_weight(set, y, *rho, gamma, cfg.resolution);
                Ok(if inf > 0.0 { total / vol / inf } else { f64::INFINITY })
            })();
            (*j, c, Witness::Ball { center: y.clone(), radius: *rho })
        })
        .collect();
    let mut report = conclude(Condition::A1, s, &radii, fit_max, samples, cfg.slope_tol)?;
    if report.max_constant.is_some_and(f64::is_infinite) {
        report.verdict = Outcome::Fail;
    }
    Ok(report)
}

fn cell_min_weight(set: &SetHandle, y: &[f64], rho: f64, gamma: f64, res: usize) -> f64 {
    let n = y.len();
    let h = 2.0 * rho / res as f64;
    let mut best = f64::INFINITY;
    let mut c = vec![0.0; n];
    for flat in 0..res.pow(n as u32) {
        let mut rest = flat;
        for a in 0..n {
            c[a] = y[a] - rho + ((rest % res) as f64 + 0.5) * h;
            rest /= res;
        }
        if dist(&c, y) < rho {
            let d = set.dist(&c);
            let w = match (gamma == 0.0, d == 0.0) {
                (true, _) => 1.0,
                (false, true) if gamma > 0.0 => 0.0,
                (false, true) => f64::INFINITY,
                (false, false) => d.powf(gamma),
            };
            best = best.min(w);
        }
    }
    best
}
