//! Small Euclidean helpers shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Volume of the unit ball in ℝⁿ.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Surface area of the unit sphere S^{n-1} ⊂ ℝⁿ.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// Axis-parallel box with `upper > lower` on every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidArgument("box corners must have equal nonzero length".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(u > l)) {
            return Err(Error::InvalidArgument("box upper corner must exceed lower corner on every axis".into()));
        }
        Ok(Self { lower, upper })
    }

    /// Cube `[c - h, c + h]^n`.
    pub fn cube(center: &[f64], half: f64) -> Self {
        Self { lower: center.iter().map(|c| c - half).collect(), upper: center.iter().map(|c| c + half).collect() }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn max_side(&self) -> f64 {
        (0..self.dim()).map(|i| self.side(i)).fold(0.0, f64::max)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect()
    }

    pub fn diameter(&self) -> f64 {
        dist(&self.lower, &self.upper)
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.side(i)).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lower.iter().zip(&self.upper)).all(|(v, (l, u))| *v >= *l && *v <= *u)
    }

    pub fn is_cube(&self) -> bool {
        let s = self.side(0);
        (1..self.dim()).all(|i| (self.side(i) - s).abs() <= 1e-12 * s.abs().max(1.0))
    }
}

/// Integration region: an axis box or a Euclidean ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Region {
    Box(Bounds),
    Ball { center: Vec<f64>, radius: f64 },
}

impl Region {
    pub fn ball(center: &[f64], radius: f64) -> Self {
        Region::Ball { center: center.to_vec(), radius }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Box(b) => b.dim(),
            Region::Ball { center, .. } => center.len(),
        }
    }

    /// Smallest axis box containing the region.
    pub fn bounding_box(&self) -> Bounds {
        match self {
            Region::Box(b) => b.clone(),
            Region::Ball { center, radius } => Bounds::cube(center, *radius),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Box(b) => b.contains(x),
            Region::Ball { center, radius } => dist(center, x) < *radius,
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Region::Box(b) => b.volume(),
            Region::Ball { center, radius } => unit_ball_volume(center.len()) * radius.powi(center.len() as i32),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Region::Box(b) => b.diameter(),
            Region::Ball { radius, .. } => 2.0 * radius,
        }
    }

    /// Center point and the radius of a ball containing the region.
    pub fn enclosing_ball(&self) -> (Vec<f64>, f64) {
        match self {
            Region::Box(b) => (b.center(), 0.5 * b.diameter()),
            Region::Ball { center, radius } => (center.clone(), *radius),
        }
    }
}

/// Pairwise (tree) summation; the result depends only on the order of `v`.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}
