//! Test functions: radial profiles about a center, axis-concentrated profiles, and
//! grid-valued functions.

use crate::field::{gradient, magnitude, GridField};
use crate::geom::{dist, Bounds, Region};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Bump,
    Tent,
    SphereFj,
    RadialPower,
    AxisPower,
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// 1 on `B(c, r)`, 0 off `B(c, 2r)`, quintic smoothstep in between.
    Bump { center: Vec<f64>, r: f64 },
    /// `max(0, 1 − |x − c|/r)`.
    Tent { center: Vec<f64>, r: f64 },
    /// 1 for `|x−c| ≤ R(1 − 2^{1−j})`, 0 for `|x−c| ≥ R(1 − 2^{−j})`, linear in between.
    SphereFj { center: Vec<f64>, radius: f64, j: u32 },
    /// `min(|x−c|, outer)^{−γ}` clipped at `inner`, then a linear cutoff on `[outer, 2·outer]`.
    RadialPower { center: Vec<f64>, gamma: f64, inner: f64, outer: f64 },
    /// `g(ρ)·h(z)` with `ρ` the distance to the coordinate axis `axis` and `z` the
    /// coordinate along it: `g = (ρ/R)^a` on `[0, R]` falling linearly to 0 at `2R`,
    /// `h = 1` on `|z| ≤ L` falling linearly to 0 at `2L`.
    AxisPower { n: usize, axis: usize, a: f64, radius: f64, half_length: f64 },
    /// Cell-center values with a finite-difference gradient magnitude.
    Custom { values: GridField, grad: GridField },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub shape: Shape,
    pub amplitude: f64,
}

/// Radial profile `g(t)` and `|g′(t)|`, with its kinks and support radius.
pub(crate) struct RadialView<'a> {
    pub center: &'a [f64],
    pub kinks: Vec<f64>,
    pub support: f64,
}

impl TestFunction {
    pub fn new(shape: Shape) -> Self {
        Self { shape, amplitude: 1.0 }
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.amplitude *= c;
        self
    }

    pub fn family(&self) -> Family {
        match self.shape {
            Shape::Bump { .. } => Family::Bump,
            Shape::Tent { .. } => Family::Tent,
            Shape::SphereFj { .. } => Family::SphereFj,
            Shape::RadialPower { .. } => Family::RadialPower,
            Shape::AxisPower { .. } => Family::AxisPower,
            Shape::Custom { .. } => Family::Custom,
        }
    }

    pub fn label(&self) -> String {
        let c = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        match &self.shape {
            Shape::Bump { center, r } => format!("bump(c=[{}],r={r})", c(center)),
            Shape::Tent { center, r } => format!("tent(c=[{}],r={r})", c(center)),
            Shape::SphereFj { j, .. } => format!("sphere-fj(j={j})"),
            Shape::RadialPower { center, gamma, inner, outer } => {
                format!("radial-power(c=[{}],gamma={gamma},inner={inner:e},outer={outer})", c(center))
            }
            Shape::AxisPower { axis, a, radius, half_length, .. } => {
                format!("axis-power(axis={axis},a={a},R={radius},L={half_length})")
            }
            Shape::Custom { values, .. } => format!("custom(grid={:?})", values.res),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Bump { center, .. }
            | Shape::Tent { center, .. }
            | Shape::SphereFj { center, .. }
            | Shape::RadialPower { center, .. } => center.len(),
            Shape::AxisPower { n, .. } => *n,
            Shape::Custom { values, .. } => values.dim(),
        }
    }

    pub(crate) fn radial(&self) -> Option<RadialView<'_>> {
        match &self.shape {
            Shape::Bump { center, r } => Some(RadialView { center, kinks: vec![*r, 2.0 * r], support: 2.0 * r }),
            Shape::Tent { center, r } => Some(RadialView { center, kinks: vec![*r], support: *r }),
            Shape::SphereFj { center, radius, j } => {
                let (a, b) = fj_shell(*radius, *j);
                Some(RadialView { center, kinks: vec![a, b], support: b })
            }
            Shape::RadialPower { center, inner, outer, .. } => {
                Some(RadialView { center, kinks: vec![*inner, *outer, 2.0 * outer], support: 2.0 * outer })
            }
            _ => None,
        }
    }

    /// `(g(t), |g′(t)|)` of a radial shape, without the amplitude.
    pub(crate) fn profile(&self, t: f64) -> (f64, f64) {
        match &self.shape {
            Shape::Bump { r, .. } => {
                if t <= *r {
                    (1.0, 0.0)
                } else if t >= 2.0 * r {
                    (0.0, 0.0)
                } else {
                    let u = (t - r) / r;
                    let s = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
                    let ds = 30.0 * u * u * (1.0 - u) * (1.0 - u);
                    (1.0 - s, ds / r)
                }
            }
            Shape::Tent { r, .. } => {
                if t < *r {
                    (1.0 - t / r, 1.0 / r)
                } else {
                    (0.0, 0.0)
                }
            }
            Shape::SphereFj { radius, j, .. } => {
                let (a, b) = fj_shell(*radius, *j);
                if t <= a {
                    (1.0, 0.0)
                } else if t >= b {
                    (0.0, 0.0)
                } else {
                    ((b - t) / (b - a), 1.0 / (b - a))
                }
            }
            Shape::RadialPower { gamma, inner, outer, .. } => {
                if t < *inner {
                    (inner.powf(-gamma), 0.0)
                } else if t <= *outer {
                    (t.powf(-gamma), (gamma * t.powf(-gamma - 1.0)).abs())
                } else if t < 2.0 * outer {
                    let top = outer.powf(-gamma);
                    (top * (2.0 - t / outer), top / outer)
                } else {
                    (0.0, 0.0)
                }
            }
            _ => unreachable!("profile of a non-radial shape"),
        }
    }

    /// `(g(ρ), g′(ρ), h(z), h′(z))` of an axis shape, without the amplitude.
    pub(crate) fn axis_profile(&self, rho: f64, z: f64) -> (f64, f64, f64, f64) {
        let Shape::AxisPower { a, radius, half_length, .. } = &self.shape else {
            unreachable!("axis profile of a non-axis shape");
        };
        let (g, dg) = if rho <= *radius {
            ((rho / radius).powf(*a), a * (rho / radius).powf(a - 1.0) / radius)
        } else if rho < 2.0 * radius {
            (2.0 - rho / radius, 1.0 / radius)
        } else {
            (0.0, 0.0)
        };
        let l = *half_length;
        let (h, dh) = if z.abs() <= l {
            (1.0, 0.0)
        } else if z.abs() < 2.0 * l {
            (2.0 - z.abs() / l, 1.0 / l)
        } else {
            (0.0, 0.0)
        };
        (g, dg, h, dh)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.amplitude * self.raw(x).0
    }

    /// `|∇f(x)|`.
    pub fn grad_norm(&self, x: &[f64]) -> f64 {
        self.amplitude.abs() * self.raw(x).1
    }

    fn raw(&self, x: &[f64]) -> (f64, f64) {
        match &self.shape {
            Shape::AxisPower { axis, .. } => {
                let rho = x.iter().enumerate().filter(|(i, _)| i != axis).map(|(_, v)| v * v).sum::<f64>().sqrt();
                let (g, dg, h, dh) = self.axis_profile(rho, x[*axis]);
                (g * h, ((dg * h).powi(2) + (g * dh).powi(2)).sqrt())
            }
            Shape::Custom { values, grad } => (values.interpolate(x), grad.interpolate(x)),
            _ => {
                let center = self.radial().unwrap().center;
                self.profile(dist(x, center))
            }
        }
    }

    /// Region outside of which `f` vanishes.
    pub fn support(&self) -> Region {
        match &self.shape {
            Shape::AxisPower { n, axis, radius, half_length, .. } => {
                let half: Vec<f64> =
                    (0..*n).map(|i| if i == *axis { 2.0 * half_length } else { 2.0 * radius }).collect();
                Region::Box(Bounds { lower: half.iter().map(|h| -h).collect(), upper: half })
            }
            Shape::Custom { values, .. } => Region::Box(values.bounds.clone()),
            _ => {
                let v = self.radial().unwrap();
                Region::ball(v.center, v.support)
            }
        }
    }

    /// Samples of `f` and `|∇f|` at the cell centers of a grid over `bounds`.
    pub fn realize(&self, bounds: &Bounds, resolution: usize) -> Result<(GridField, GridField)> {
        Ok((
            GridField::from_fn(bounds, resolution, |x| self.value(x))?,
            GridField::from_fn(bounds, resolution, |x| self.grad_norm(x))?,
        ))
    }
}

fn fj_shell(radius: f64, j: u32) -> (f64, f64) {
    let j = j as i32;
    (radius * (1.0 - 2f64.powi(1 - j)), radius * (1.0 - 2f64.powi(-j)))
}

pub fn family_bump(center: &[f64], r: f64) -> Result<TestFunction> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("bump radius must be positive".into()));
    }
    Ok(TestFunction::new(Shape::Bump { center: center.to_vec(), r }))
}

pub fn family_tent(center: &[f64], r: f64) -> Result<TestFunction> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("tent radius must be positive".into()));
    }
    Ok(TestFunction::new(Shape::Tent { center: center.to_vec(), r }))
}

/// The cutoff `f_j` for the unit sphere in ℝⁿ centered at the origin. With a
/// `resolution` (cells across `[−1, 1]`), the transition shell of width `2^{−j}` must
/// span at least 8 cells.
pub fn family_sphere_fj(j: u32, n: usize, resolution: Option<usize>) -> Result<TestFunction> {
    if j < 2 {
        return Err(Error::InvalidArgument("sphere family needs j ≥ 2".into()));
    }
    if let Some(res) = resolution {
        let h = 2.0 / res as f64;
        if 2f64.powi(-(j as i32)) < 8.0 * h {
            return Err(Error::ResolutionTooCoarse(format!(
                "shell width 2^-{j} spans {:.1} cells, need 8",
                2f64.powi(-(j as i32)) / h
            )));
        }
    }
    Ok(TestFunction::new(Shape::SphereFj { center: vec![0.0; n], radius: 1.0, j }))
}

pub fn family_radial_power(center: &[f64], gamma: f64, inner: f64, outer: f64) -> Result<TestFunction> {
    if !(inner > 0.0 && inner < outer) {
        return Err(Error::InvalidArgument("radial power needs 0 < inner < outer".into()));
    }
    Ok(TestFunction::new(Shape::RadialPower { center: center.to_vec(), gamma, inner, outer }))
}

pub fn family_axis_power(n: usize, axis: usize, a: f64, radius: f64, half_length: f64) -> Result<TestFunction> {
    if axis >= n || !(a > 0.0 && radius > 0.0 && half_length > 0.0) {
        return Err(Error::InvalidArgument("axis power needs axis < n and a, R, L > 0".into()));
    }
    Ok(TestFunction::new(Shape::AxisPower { n, axis, a, radius, half_length }))
}

/// Grid-valued test function; the gradient is taken by finite differences.
pub fn family_custom(values: GridField) -> Result<TestFunction> {
    let grad = magnitude(&gradient(&values)?);
    Ok(TestFunction::new(Shape::Custom { values, grad }))
}
