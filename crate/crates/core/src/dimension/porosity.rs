//! Porosity: every ball `B(x, r)` centered on `E` contains a hole `B(y, c·r)` missing `E`.

use crate::geom::dist;
use crate::setmodel::SetHandle;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PorosityConfig {
    pub samples: usize,
    /// Radii `r_j = r_max·2^{-j}`, `j = 0..r_levels`.
    pub r_levels: usize,
    pub r_max: Option<f64>,
    /// Candidate hole centers per axis in the first search pass.
    pub grid: usize,
    /// Smallest hole constant accepted as porous.
    pub threshold: f64,
    pub seed: u64,
}

impl Default for PorosityConfig {
    fn default() -> Self {
        Self { samples: 16, r_levels: 4, r_max: None, grid: 9, threshold: 0.05, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PorosityReport {
    /// Min over sampled `(x, r)` of the best hole constant.
    pub c: f64,
    pub worst_center: Vec<f64>,
    pub worst_radius: f64,
    pub porous: bool,
    pub threshold: f64,
    pub samples: usize,
}

/// Largest `c` with `B(y, c·r) ⊂ B(x, r) \ E` found by a grid search over `y` with two
/// local refinements around the best candidate.
pub fn best_hole(set: &SetHandle, x: &[f64], r: f64, grid: usize) -> f64 {
    let n = x.len();
    let score = |y: &[f64]| {
        let inner = r - dist(x, y);
        if inner <= 0.0 {
            return 0.0;
        }
        (set.dist(y) - set.mesh()).max(0.0).min(inner) / r
    };
    let g = grid.max(3);
    let mut best = (0.0, x.to_vec());
    let mut center = x.to_vec();
    let mut half = r;
    for _ in 0..3 {
        let step = 2.0 * half / (g - 1) as f64;
        let total = g.pow(n as u32);
        let mut y = vec![0.0; n];
        for idx in 0..total {
            let mut rest = idx;
            for a in 0..n {
                y[a] = center[a] - half + (rest % g) as f64 * step;
                rest /= g;
            }
            let s = score(&y);
            if s > best.0 {
                best = (s, y.clone());
            }
        }
        center = best.1.clone();
        half = step;
    }
    best.0
}

/// Samples `x ∈ E` and dyadic radii, and reports the worst best-hole constant.
pub fn porosity_check(set: &SetHandle, cfg: &PorosityConfig) -> PorosityReport {
    let r_max = cfg.r_max.unwrap_or_else(|| {
        if set.bounded() && set.diameter() > 0.0 {
            0.25 * set.diameter()
        } else {
            0.125 * set.window().max_side()
        }
    });
    let xs = set.sample_points(cfg.samples.max(1), cfg.seed);
    let tasks: Vec<(Vec<f64>, f64)> = xs
        .iter()
        .flat_map(|x| (0..cfg.r_levels.max(1)).map(move |j| (x.clone(), r_max * 2f64.powi(-(j as i32)))))
        .filter(|(_, r)| *r > 8.0 * set.mesh())
        .collect();
    let scores: Vec<f64> = tasks.par_iter().map(|(x, r)| best_hole(set, x, *r, cfg.grid)).collect();
    let (i, c) = scores.iter().copied().enumerate().fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let c = if scores.is_empty() { 0.0 } else { c };
    PorosityReport {
        c,
        worst_center: tasks.get(i).map(|t| t.0.clone()).unwrap_or_default(),
        worst_radius: tasks.get(i).map_or(0.0, |t| t.1),
        porous: c >= cfg.threshold,
        threshold: cfg.threshold,
        samples: scores.len(),
    }
}
