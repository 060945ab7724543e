//! Exponent bookkeeping for `(q,p,β)`-Hardy–Sobolev inequalities.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyParams {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub beta: f64,
}

impl HardyParams {
    pub fn new(n: usize, p: f64, q: f64, beta: f64) -> Self {
        Self { n, p, q, beta }
    }

    /// Violated standing assumptions (`1 ≤ p ≤ q`, `p < n`, `q ≤ p*`); they are
    /// reported, not rejected.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        let n = self.n as f64;
        if self.p < 1.0 {
            w.push(format!("p = {} < 1", self.p));
        }
        if self.q < self.p {
            w.push(format!("q = {} < p = {}", self.q, self.p));
        }
        if self.p >= n {
            w.push(format!("p = {} ≥ n = {}", self.p, self.n));
        } else if self.q > n * self.p / (n - self.p) * (1.0 + 1e-12) {
            w.push(format!("q = {} exceeds the Sobolev exponent", self.q));
        }
        w
    }

    /// `(q/p)(n − p + β) − n`, the exponent of `δ` on the left-hand side.
    pub fn lhs_weight(&self) -> f64 {
        self.q / self.p * (self.n as f64 - self.p + self.beta) - self.n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedExponents {
    pub params: HardyParams,
    /// `np/(n−p)`, infinite when `p ≥ n`.
    pub p_star: f64,
    pub lhs_weight: f64,
    /// `p²/(np − nq + qp)`; absent where the denominator vanishes (`q = p*`).
    pub alpha: Option<f64>,
    /// `α/(α−1)`; absent at `α = 1` (`q = p`) and wherever `α` is.
    pub alpha_prime: Option<f64>,
    /// `|1/(qα) + (n/(n−p))/(qα′) − 1/p|` when `α`, `α′` exist.
    pub identity_residual: Option<f64>,
    pub q_hat: f64,
    pub beta_hat: f64,
    pub extra_bound: f64,
    pub thin_threshold: f64,
    pub warnings: Vec<String>,
}

pub fn exponent_algebra(params: &HardyParams) -> DerivedExponents {
    let HardyParams { n, p, q, beta } = *params;
    let n = n as f64;
    let p_star = if p < n { n * p / (n - p) } else { f64::INFINITY };
    let denom = n * p - n * q + q * p;
    let alpha = (denom.abs() > 1e-14 * (n * p).max(1.0)).then(|| p * p / denom);
    let alpha_prime = alpha.filter(|a| (a - 1.0).abs() > 1e-14).map(|a| a / (a - 1.0));
    let identity_residual = match (alpha, alpha_prime) {
        (Some(a), Some(ap)) if p < n => Some((1.0 / (q * a) + n / (n - p) / (q * ap) - 1.0 / p).abs()),
        _ => None,
    };
    let q_hat = 1.0 / (1.0 - 1.0 / p + 1.0 / q);
    DerivedExponents {
        params: *params,
        p_star,
        lhs_weight: params.lhs_weight(),
        alpha,
        alpha_prime,
        identity_residual,
        q_hat,
        beta_hat: q * (n - p + beta) / (q_hat * p) - n + 1.0,
        extra_bound: (p - 1.0) * (q * p + n * p - n * q) / (q * p + p - q),
        thin_threshold: (q / p * (n - p + beta)).min(n - 1.0),
        warnings: params.warnings(),
    }
}

/// `(α, α′)` for the interpolation step; requires `p < q < p*`.
pub fn interpolation_exponents(params: &HardyParams) -> Result<(f64, f64)> {
    let d = exponent_algebra(params);
    let inside = params.p < params.q && params.q < d.p_star;
    match (inside, d.alpha, d.alpha_prime) {
        (true, Some(a), Some(ap)) => Ok((a, ap)),
        _ => Err(Error::DegenerateExponent(format!(
            "interpolation needs p < q < p*, got p = {}, q = {}, p* = {}",
            params.p, params.q, d.p_star
        ))),
    }
}

/// Bound on `κ_{q,p,β}` from the `(p,β)`-Hardy constant and the Sobolev constant:
/// `κ_{p,p,β}^{p/(qα)} · (κ_{p*,p,0}(1 + |β|/p·κ_{p,p,β}))^{p*/(qα′)}`.
pub fn interpolation_bound(kappa_ppb: f64, kappa_sob: f64, params: &HardyParams) -> Result<f64> {
    let (a, ap) = interpolation_exponents(params)?;
    let HardyParams { n, p, q, beta } = *params;
    let p_star = n as f64 * p / (n as f64 - p);
    let sob = kappa_sob * (1.0 + beta.abs() / p * kappa_ppb);
    Ok(kappa_ppb.powf(p / (q * a)) * sob.powf(p_star / (q * ap)))
}
