//! Uniform isotropic grids over boxes: distance rasterization, finite-difference
//! gradients, export, and adaptive quadrature of singular weights `δ_E^γ`.

mod edt;
mod quad;

pub use edt::squared_edt;
pub use quad::{integrate_weighted, Integral, Integrand, QuadConfig};

use crate::geom::Bounds;
use crate::setmodel::SetHandle;
use crate::{Error, Result};
use rayon::prelude::*;
use std::io::Write;

/// Default cap on the number of grid cells a single operation may allocate.
pub const DEFAULT_CELL_CAP: usize = 1 << 26;

/// Cell-centered samples on a uniform grid with square cells of side `h`.
///
/// The grid covers `bounds`; when a side is not a multiple of `h` the upper corner is
/// moved outward so every axis holds a whole number of cells. Values are stored in
/// row-major order (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub bounds: Bounds,
    pub res: Vec<usize>,
    pub h: f64,
    pub values: Vec<f64>,
}

impl GridField {
    /// Zero field with `resolution` cells along the longest side of `bounds`.
    pub fn zeros(bounds: &Bounds, resolution: usize) -> Result<Self> {
        Self::zeros_capped(bounds, resolution, DEFAULT_CELL_CAP)
    }

    pub fn zeros_capped(bounds: &Bounds, resolution: usize, cap: usize) -> Result<Self> {
        if resolution < 1 {
            return Err(Error::InvalidArgument("resolution must be ≥ 1".into()));
        }
        let h = bounds.max_side() / resolution as f64;
        let res: Vec<usize> =
            (0..bounds.dim()).map(|i| ((bounds.side(i) / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize).collect();
        let total = res.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r));
        match total {
            Some(t) if t <= cap => {}
            _ => return Err(Error::BudgetExceeded { requested: total.unwrap_or(usize::MAX), cap }),
        }
        let upper = (0..bounds.dim()).map(|i| bounds.lower[i] + res[i] as f64 * h).collect();
        Ok(Self { bounds: Bounds { lower: bounds.lower.clone(), upper }, values: vec![0.0; total.unwrap()], res, h })
    }

    /// Samples `f` at every cell center (in parallel; the result does not depend on
    /// the number of threads).
    pub fn from_fn<F>(bounds: &Bounds, resolution: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let mut g = Self::zeros(bounds, resolution)?;
        let values: Vec<f64> = (0..g.len()).into_par_iter().map(|i| f(&g.center(i))).collect();
        g.values = values;
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.res.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim() as i32)
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.res).fold(0, |acc, (&i, &r)| acc * r + i)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.res[a];
            flat /= self.res[a];
        }
        idx
    }

    pub fn center(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat).iter().zip(&self.bounds.lower).map(|(&i, l)| l + (i as f64 + 0.5) * self.h).collect()
    }

    /// Multilinear interpolation of the cell-center values, clamped at the faces.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let n = self.dim();
        let mut base = [0usize; crate::setmodel::MAX_DIM];
        let mut frac = [0.0f64; crate::setmodel::MAX_DIM];
        for a in 0..n {
            let u = ((x[a] - self.bounds.lower[a]) / self.h - 0.5).clamp(0.0, (self.res[a] - 1) as f64);
            let i = (u.floor() as usize).min(self.res[a].saturating_sub(2));
            base[a] = i;
            frac[a] = if self.res[a] == 1 { 0.0 } else { u - i as f64 };
        }
        let mut acc = 0.0;
        for corner in 0..1usize << n {
            let mut w = 1.0;
            let mut flat = 0;
            for a in 0..n {
                let hi = corner >> a & 1 == 1;
                if hi && self.res[a] == 1 {
                    w = 0.0;
                    break;
                }
                w *= if hi { frac[a] } else { 1.0 - frac[a] };
                flat = flat * self.res[a] + base[a] + hi as usize;
            }
            if w != 0.0 {
                acc += w * self.values[flat];
            }
        }
        acc
    }

    /// Riemann sum `Σ v·h^n` over all cells.
    pub fn sum(&self) -> f64 {
        crate::geom::pairwise_sum(&self.values) * self.cell_volume()
    }

    /// CSV rows `index,x_0,…,x_{n-1},value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let head: Vec<String> = (0..self.dim()).map(|i| format!("x{i}")).collect();
        writeln!(w, "index,{},value", head.join(","))?;
        for (i, v) in self.values.iter().enumerate() {
            let c: Vec<String> = self.center(i).iter().map(|x| x.to_string()).collect();
            writeln!(w, "{i},{},{v}", c.join(","))?;
        }
        Ok(())
    }

    /// Little-endian binary layout:
    ///
    /// | bytes        | content                          |
    /// |--------------|----------------------------------|
    /// | 4            | magic `FHLG`                     |
    /// | 4            | `u32` format version (1)         |
    /// | 4            | `u32` dimension `n`              |
    /// | 8·n          | `u64` cells per axis             |
    /// | 8            | `f64` spacing `h`                |
    /// | 8·n          | `f64` lower corner               |
    /// | 8·Π res      | `f64` values, row-major          |
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 16 * self.dim() + 8 * self.len());
        out.extend_from_slice(b"FHLG");
        out.extend_from_slice(&1u32.to_le_bytes());
        out.extend_from_slice(&(self.dim() as u32).to_le_bytes());
        for &r in &self.res {
            out.extend_from_slice(&(r as u64).to_le_bytes());
        }
        out.extend_from_slice(&self.h.to_le_bytes());
        for l in &self.bounds.lower {
            out.extend_from_slice(&l.to_le_bytes());
        }
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = || Error::InvalidArgument("malformed grid file".into());
        let mut pos = 0;
        let mut take = |k: usize| -> Result<&[u8]> {
            let s = bytes.get(pos..pos + k).ok_or_else(bad)?;
            pos += k;
            Ok(s)
        };
        if take(4)? != b"FHLG" {
            return Err(bad());
        }
        let u32_at = |s: &[u8]| u32::from_le_bytes(s.try_into().unwrap());
        let f64_at = |s: &[u8]| f64::from_le_bytes(s.try_into().unwrap());
        if u32_at(take(4)?) != 1 {
            return Err(bad());
        }
        let n = u32_at(take(4)?) as usize;
        let res = (0..n)
            .map(|_| Ok(u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize))
            .collect::<Result<Vec<_>>>()?;
        let h = f64_at(take(8)?);
        let lower = (0..n).map(|_| Ok(f64_at(take(8)?))).collect::<Result<Vec<_>>>()?;
        let total: usize = res.iter().product();
        let values = (0..total).map(|_| Ok(f64_at(take(8)?))).collect::<Result<Vec<_>>>()?;
        let upper = lower.iter().zip(&res).map(|(l, &r)| l + r as f64 * h).collect();
        Ok(Self { bounds: Bounds { lower, upper }, res, h, values })
    }
}

/// Distance to `set` at every cell center, one oracle query per cell.
pub fn rasterize_distance(set: &SetHandle, bounds: &Bounds, resolution: usize) -> Result<GridField> {
    if resolution < 2 {
        return Err(Error::InvalidArgument("resolution must be ≥ 2".into()));
    }
    if bounds.dim() != set.dim() {
        return Err(Error::DimensionMismatch { expected: set.dim(), got: bounds.dim() });
    }
    GridField::from_fn(bounds, resolution, |x| set.dist(x))
}

/// Distance to a point cloud through an exact transform of the rasterized cloud.
///
/// Each point marks the cell containing it (points outside the grid are ignored), so
/// the result differs from the exact distance to the cloud by at most half a cell
/// diagonal.
pub fn distance_transform(points: &[Vec<f64>], bounds: &Bounds, resolution: usize) -> Result<GridField> {
    let mut g = GridField::zeros(bounds, resolution)?;
    let mut seeds = vec![false; g.len()];
    for p in points {
        if !g.bounds.contains(p) {
            continue;
        }
        let idx: Vec<usize> =
            (0..g.dim()).map(|a| (((p[a] - g.bounds.lower[a]) / g.h) as usize).min(g.res[a] - 1)).collect();
        seeds[g.flat_index(&idx)] = true;
    }
    let h = g.h;
    g.values = squared_edt(&seeds, &g.res).into_iter().map(|d| d.sqrt() * h).collect();
    Ok(g)
}

/// Partial derivatives: central differences inside, second-order one-sided
/// differences at the faces. Needs at least 3 cells per axis.
pub fn gradient(field: &GridField) -> Result<Vec<GridField>> {
    if field.res.iter().any(|&r| r < 3) {
        return Err(Error::ResolutionTooCoarse("gradient needs ≥ 3 cells per axis".into()));
    }
    let n = field.dim();
    let h = field.h;
    Ok((0..n)
        .map(|axis| {
            let stride: usize = field.res[axis + 1..].iter().product();
            let len = field.res[axis];
            let values = (0..field.len())
                .into_par_iter()
                .map(|i| {
                    let k = (i / stride) % len;
                    let v = |j: usize| field.values[i - k * stride + j * stride];
                    if k == 0 {
                        (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h)
                    } else if k == len - 1 {
                        (3.0 * v(k) - 4.0 * v(k - 1) + v(k - 2)) / (2.0 * h)
                    } else {
                        (v(k + 1) - v(k - 1)) / (2.0 * h)
                    }
                })
                .collect();
            GridField { values, ..field.clone() }
        })
        .collect())
}

/// Euclidean norm of a vector field, cellwise.
pub fn magnitude(components: &[GridField]) -> GridField {
    let values = (0..components[0].len())
        .map(|i| components.iter().map(|c| c.values[i] * c.values[i]).sum::<f64>().sqrt())
        .collect();
    GridField { values, ..components[0].clone() }
}
