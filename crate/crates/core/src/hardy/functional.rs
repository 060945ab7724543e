//! Both sides of the `(q,p,β)`-Hardy–Sobolev inequality for a test function.

use super::exponents::{interpolation_exponents, HardyParams};
use super::family::{Shape, TestFunction};
use super::reduce::{integrate_1d, integrate_axisym, Quad};
use crate::field::{integrate_weighted, Integrand, QuadConfig};
use crate::geom::unit_sphere_area;
use crate::setmodel::{SetHandle, SetKind};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalMethod {
    /// Radial reduction when available, then axisymmetric, then the grid.
    Auto,
    /// `∫ F(|x−c|)` as a 1D integral; needs `E` a point or a sphere centered at `c`.
    Radial,
    /// 2D integral in (distance to axis, coordinate along it); needs `E` a coordinate line.
    Axisymmetric,
    /// Adaptive midpoint quadrature on the support.
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub resolution: usize,
    pub max_subdiv: usize,
    pub method: EvalMethod,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { resolution: 48, max_subdiv: 6, method: EvalMethod::Auto }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideValues {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_root: f64,
    pub rhs_root: f64,
    /// `κ̂ = lhs^{1/q} / rhs^{1/p}`; absent when the right side vanishes.
    pub ratio: Option<f64>,
    pub lhs_error: f64,
    pub rhs_error: f64,
    pub method: EvalMethod,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

/// Exact geometry of `E` that the reductions can use.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Geometry {
    Point(Vec<f64>),
    Sphere(Vec<f64>, f64),
    Line(usize),
    Other,
}

pub(crate) fn geometry(set: &SetHandle) -> Geometry {
    let s = set.spec();
    let p = &s.params;
    match s.kind {
        SetKind::Points => match p.points.as_deref() {
            Some([x]) if x.len() == set.dim() => Geometry::Point(x.clone()),
            _ => Geometry::Other,
        },
        SetKind::Sphere => match (&p.center, p.radius) {
            (Some(c), Some(r)) => Geometry::Sphere(c.clone(), r),
            _ => Geometry::Other,
        },
        SetKind::Subspace if p.m == Some(1) => Geometry::Line(p.axes.as_ref().map_or(0, |a| a[0])),
        _ => Geometry::Other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Value,
    Grad,
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12)
}

fn on_axis(c: &[f64], axis: usize) -> bool {
    c.iter().enumerate().all(|(i, v)| i == axis || v.abs() <= 1e-12)
}

/// The reduction `Auto` resolves to for this function and set.
fn resolve(f: &TestFunction, set: &SetHandle, method: EvalMethod) -> EvalMethod {
    if method != EvalMethod::Auto {
        return method;
    }
    match (geometry(set), f.radial(), &f.shape) {
        (Geometry::Point(c) | Geometry::Sphere(c, _), Some(v), _) if same_point(&c, v.center) => EvalMethod::Radial,
        (Geometry::Line(axis), Some(v), _) if on_axis(v.center, axis) => EvalMethod::Axisymmetric,
        (Geometry::Line(axis), None, Shape::AxisPower { axis: a, .. }) if *a == axis => EvalMethod::Axisymmetric,
        _ => EvalMethod::Grid,
    }
}

fn weighted_power(v: f64, power: f64, w: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.abs().powf(power) * w
    }
}

fn delta_pow(d: f64, gamma: f64) -> f64 {
    if gamma == 0.0 {
        1.0
    } else {
        d.powf(gamma)
    }
}

/// `∫ |f|^power δ^γ` (or `|∇f|^power`) by the given method.
fn integrate_part(
    f: &TestFunction,
    set: &SetHandle,
    part: Part,
    power: f64,
    gamma: f64,
    method: EvalMethod,
    cfg: &EvalConfig,
) -> Result<Quad> {
    let n = set.dim();
    let amp = f.amplitude.abs();
    let pick = |g: f64, dg: f64| amp * if part == Part::Value { g } else { dg };
    match method {
        EvalMethod::Radial => {
            let v =
                f.radial().ok_or_else(|| Error::InvalidArgument("radial reduction needs a radial function".into()))?;
            let omega = unit_sphere_area(n);
            let (sing, sphere_r) = match geometry(set) {
                Geometry::Point(c) if same_point(&c, v.center) => (vec![0.0], None),
                Geometry::Sphere(c, r) if same_point(&c, v.center) => (vec![r], Some(r)),
                _ => {
                    return Err(Error::InvalidArgument(
                        "radial reduction needs E a point or sphere at the center".into(),
                    ))
                }
            };
            let integrand = |t: f64| {
                let (g, dg) = f.profile(t);
                let d = sphere_r.map_or(t, |r| (t - r).abs());
                weighted_power(pick(g, dg), power, delta_pow(d, gamma) * omega * t.powi(n as i32 - 1))
            };
            integrate_1d(&integrand, 0.0, v.support, &v.kinks, &sing)
        }
        EvalMethod::Axisymmetric => {
            let Geometry::Line(axis) = geometry(set) else {
                return Err(Error::InvalidArgument("axisymmetric reduction needs E a coordinate line".into()));
            };
            let omega = unit_sphere_area(n - 1);
            let measure = |rho: f64| delta_pow(rho, gamma) * omega * rho.powi(n as i32 - 2);
            if let Some(v) = f.radial() {
                if !on_axis(v.center, axis) {
                    return Err(Error::InvalidArgument("radial function must be centered on the line".into()));
                }
                let cz = v.center[axis];
                let kinks = v.kinks.clone();
                let integrand = |rho: f64, z: f64| {
                    let (g, dg) = f.profile((rho * rho + (z - cz).powi(2)).sqrt());
                    weighted_power(pick(g, dg), power, measure(rho))
                };
                let rho_breaks = |z: f64| -> Vec<f64> {
                    let dz = (z - cz).abs();
                    kinks.iter().filter(|&&k| k > dz).map(|k| (k * k - dz * dz).sqrt()).collect()
                };
                let mut zb: Vec<f64> = v.kinks.iter().flat_map(|k| [cz - k, cz + k]).collect();
                zb.push(cz);
                integrate_axisym(&integrand, v.support, (cz - v.support, cz + v.support), &rho_breaks, &zb)
            } else if let Shape::AxisPower { axis: a, radius, half_length, .. } = &f.shape {
                if *a != axis {
                    return Err(Error::InvalidArgument("axis function must share the line's axis".into()));
                }
                let integrand = |rho: f64, z: f64| {
                    let (g, dg, h, dh) = f.axis_profile(rho, z);
                    let grad = ((dg * h).powi(2) + (g * dh).powi(2)).sqrt();
                    weighted_power(pick(g * h, grad), power, measure(rho))
                };
                let r = *radius;
                let l = *half_length;
                integrate_axisym(&integrand, 2.0 * r, (-2.0 * l, 2.0 * l), &|_| vec![r], &[-l, l])
            } else {
                Err(Error::InvalidArgument("axisymmetric reduction needs a radial or axis function".into()))
            }
        }
        EvalMethod::Grid | EvalMethod::Auto => {
            let func = |x: &[f64]| if part == Part::Value { f.value(x) } else { f.grad_norm(x) };
            let qc = QuadConfig::new(cfg.resolution, cfg.max_subdiv);
            let r = integrate_weighted(set, &f.support(), gamma, Integrand::Func(&func), power, &qc)?;
            if r.diverging {
                return Err(Error::Divergent(format!(
                    "level sums do not decay (tail slope {:.3})",
                    r.tail_slope.unwrap_or(f64::NAN)
                )));
            }
            Ok(Quad { value: r.value, error: r.error_indicator.abs() })
        }
    }
}

fn check_dims(f: &TestFunction, set: &SetHandle, params: &HardyParams) -> Result<()> {
    if f.dim() != set.dim() {
        return Err(Error::DimensionMismatch { expected: set.dim(), got: f.dim() });
    }
    if params.n != set.dim() {
        return Err(Error::DimensionMismatch { expected: set.dim(), got: params.n });
    }
    Ok(())
}

/// `lhs = ∫ |f|^q δ^{(q/p)(n−p+β)−n}` and `rhs = ∫ |∇f|^p δ^β`, with their roots and
/// the ratio `κ̂`.
pub fn evaluate_functional(
    f: &TestFunction,
    set: &SetHandle,
    params: &HardyParams,
    cfg: &EvalConfig,
) -> Result<SideValues> {
    check_dims(f, set, params)?;
    let method = resolve(f, set, cfg.method);
    let side = |name: &str, r: Result<Quad>| {
        r.map_err(|e| match e {
            Error::Divergent(m) => Error::Divergent(format!("{name}: {m}")),
            e => e,
        })
    };
    let lhs = side("lhs", integrate_part(f, set, Part::Value, params.q, params.lhs_weight(), method, cfg))?;
    let rhs = side("rhs", integrate_part(f, set, Part::Grad, params.p, params.beta, method, cfg))?;
    let lhs_root = lhs.value.max(0.0).powf(1.0 / params.q);
    let rhs_root = rhs.value.max(0.0).powf(1.0 / params.p);
    let mut flags = params.warnings();
    let ratio = if rhs_root > 0.0 {
        Some(lhs_root / rhs_root)
    } else {
        flags.push("zero right-hand side; ratio undefined".into());
        None
    };
    Ok(SideValues {
        label: f.label(),
        lhs: lhs.value,
        rhs: rhs.value,
        lhs_root,
        rhs_root,
        ratio,
        lhs_error: lhs.error,
        rhs_error: rhs.error,
        method,
        flags,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderStep {
    /// `(∫ |f|^q δ^{(q/p)(n−p+β)−n})^{1/q}`.
    pub lhs_norm: f64,
    /// `(∫ |f|^p δ^{β−p})^{1/(qα)}`.
    pub hardy_factor: f64,
    /// `(∫ |f|^{p*} δ^{nβ/(n−p)})^{1/(qα′)}`.
    pub sobolev_factor: f64,
    /// `lhs_norm − hardy_factor·sobolev_factor`; nonpositive by Hölder.
    pub residual: f64,
    /// Residual relative to the product (0 when both vanish).
    pub relative: f64,
    pub method: EvalMethod,
}

/// The Hölder step splitting the `q`-integral between the `p` and `p*` endpoints.
pub fn holder_step_check(
    f: &TestFunction,
    set: &SetHandle,
    params: &HardyParams,
    cfg: &EvalConfig,
) -> Result<HolderStep> {
    check_dims(f, set, params)?;
    let (alpha, alpha_p) = interpolation_exponents(params)?;
    let HardyParams { n, p, q, beta } = *params;
    let nf = n as f64;
    let p_star = nf * p / (nf - p);
    let method = resolve(f, set, cfg.method);
    let int = |power: f64, gamma: f64| {
        integrate_part(f, set, Part::Value, power, gamma, method, cfg).map(|r| r.value.max(0.0))
    };
    let lhs_norm = int(q, params.lhs_weight())?.powf(1.0 / q);
    let hardy_factor = int(p, beta - p)?.powf(1.0 / (q * alpha));
    let sobolev_factor = int(p_star, nf * beta / (nf - p))?.powf(1.0 / (q * alpha_p));
    let product = hardy_factor * sobolev_factor;
    let residual = lhs_norm - product;
    Ok(HolderStep {
        lhs_norm,
        hardy_factor,
        sobolev_factor,
        residual,
        relative: if product > 0.0 { residual / product } else { 0.0 },
        method,
    })
}
