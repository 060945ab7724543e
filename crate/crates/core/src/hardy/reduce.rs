//! One- and two-dimensional Gauss–Legendre quadrature for radial and axisymmetric
//! integrands, graded towards singular points.

use crate::{Error, Result};
use gauss_quad::legendre::GaussLegendre;
use std::sync::OnceLock;

fn rules() -> &'static (GaussLegendre, GaussLegendre) {
    static RULES: OnceLock<(GaussLegendre, GaussLegendre)> = OnceLock::new();
    RULES.get_or_init(|| (GaussLegendre::new(16.try_into().unwrap()), GaussLegendre::new(8.try_into().unwrap())))
}

/// Panels per smooth interval.
const PANELS: usize = 4;
/// Grading stops once the remaining gap is this small relative to the singular point,
/// or to the segment length when the singular point is 0.
const REL_FLOOR: f64 = 1e-11;
const LEN_FLOOR: f64 = 1e-40;
/// Successive panel ratios agreeing to this relative tolerance count as settled.
const SETTLE: f64 = 1e-3;
const TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Quad {
    pub value: f64,
    /// Sum of `|GL16 − GL8|` over panels plus the size of any power-law tail.
    pub error: f64,
}

impl std::ops::AddAssign for Quad {
    fn add_assign(&mut self, o: Quad) {
        self.value += o.value;
        self.error += o.error;
    }
}

fn panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Quad {
    let (hi, lo) = rules();
    let v = hi.integrate(a, b, f);
    let w = lo.integrate(a, b, f);
    Quad { value: v, error: (v - w).abs() }
}

/// `∫_a^b f` split at `breaks`. Intervals ending at a point of `singular` are cut into
/// panels shrinking geometrically towards it; the innermost gap is closed with the
/// integral of the power law `C·t^s` fitted to two samples, which must have `s > −1`.
pub fn integrate_1d(f: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], singular: &[f64]) -> Result<Quad> {
    let mut pts: Vec<f64> = vec![a, b];
    pts.extend(breaks.iter().chain(singular).copied().filter(|&x| x > a && x < b));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let is_sing = |x: f64| singular.iter().any(|&s| s == x);
    let mut total = Quad::default();
    for w in pts.windows(2) {
        let (u, v) = (w[0], w[1]);
        match (is_sing(u), is_sing(v)) {
            (false, false) if u > 0.0 && v > 4.0 * u => total += octaves(f, u, v),
            (false, false) if v < 0.0 && u < 4.0 * v => {
                let g = |t: f64| f(-t);
                total += octaves(&g, -v, -u);
            }
            (false, false) => {
                let h = (v - u) / PANELS as f64;
                for i in 0..PANELS {
                    total += panel(f, u + i as f64 * h, if i + 1 == PANELS { v } else { u + (i + 1) as f64 * h });
                }
            }
            (true, false) => total += graded(f, u, v)?,
            (false, true) => total += graded(f, v, u)?,
            (true, true) => {
                let m = 0.5 * (u + v);
                total += graded(f, u, m)?;
                total += graded(f, v, m)?;
            }
        }
    }
    Ok(total)
}

/// `∫_u^v f` for `0 < u ≪ v`, one panel per octave.
fn octaves(f: &dyn Fn(f64) -> f64, u: f64, v: f64) -> Quad {
    let mut total = Quad::default();
    let mut a = u;
    while a < v {
        let b = if 2.0 * a >= 0.75 * v { v } else { 2.0 * a };
        total += panel(f, a, b);
        a = b;
    }
    total
}

/// Integral over the segment between the singular point `s` and `o` (either order).
/// Panels halve towards `s`; once successive panel integrals shrink by a settled ratio
/// `ρ < 1` the rest is summed as a geometric series, and a settled `ρ ≥ 1` means the
/// integral diverges.
fn graded(f: &dyn Fn(f64) -> f64, s: f64, o: f64) -> Result<Quad> {
    let len = (o - s).abs();
    let dir = (o - s).signum();
    let floor = (s.abs() * REL_FLOOR).max(len * LEN_FLOOR);
    let mut total = Quad::default();
    let mut t = len;
    let mut prev: [f64; 2] = [f64::NAN; 2];
    let mut zeros = 0;
    while t > floor {
        let inner = 0.5 * t;
        // Against the axis orientation the panel integral changes sign.
        let q = panel(f, s + dir * inner, s + dir * t);
        let v = q.value * dir;
        if !v.is_finite() {
            return Err(Error::Divergent(format!("integrand not finite near {s}")));
        }
        total += Quad { value: v, error: q.error };
        t = inner;
        zeros = if v == 0.0 { zeros + 1 } else { 0 };
        if zeros >= 3 {
            return Ok(total);
        }
        let (r1, r2) = (v / prev[1], prev[1] / prev[0]);
        prev = [prev[1], v];
        if !(r1.is_finite() && r2.is_finite()) || r1 <= 0.0 {
            continue;
        }
        if (r1 - r2).abs() <= SETTLE * r1 {
            if r1 >= 1.0 - 1e-9 {
                return Err(Error::Divergent(format!("integrand ~ t^{:.3} near {s}", -r1.log2() - 1.0)));
            }
            let tail = v * r1 / (1.0 - r1);
            let slack = (v * (r1 - r2) / ((1.0 - r1) * (1.0 - r1))).abs();
            if slack <= TAIL_TOL * (total.value + tail).abs() || t <= floor {
                total.value += tail;
                total.error += slack;
                return Ok(total);
            }
        }
    }
    Err(Error::Divergent(format!("integrand not resolvable near {s}")))
}

/// `∫∫ F(ρ, z) dρ dz` over `[0, ρ_max] × [z_lo, z_hi]`, singular at `ρ = 0`; the inner
/// integral is split at `rho_breaks(z)`, the outer one graded towards `z_breaks`.
pub fn integrate_axisym(
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
    rho_max: f64,
    z: (f64, f64),
    rho_breaks: &(dyn Fn(f64) -> Vec<f64> + Sync),
    z_breaks: &[f64],
) -> Result<Quad> {
    let err = std::cell::RefCell::new(None);
    let outer = |zz: f64| -> f64 {
        let g = |r: f64| f(r, zz);
        integrate_1d(&g, 0.0, rho_max, &rho_breaks(zz), &[0.0]).map_or_else(
            |e| {
                err.borrow_mut().get_or_insert(e);
                0.0
            },
            |q| q.value,
        )
    };
    let q = integrate_1d(&outer, z.0, z.1, &[], z_breaks)?;
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(q)
}
