//! Rule-based prediction of whether `G = ℝⁿ \ E` admits a `(q,p,β)`-Hardy–Sobolev
//! inequality, from dimension estimates, and a consistency check against κ̂ evidence.

use crate::hardy::{evaluate_functional, exponent_algebra, EvalConfig, HardyParams, TestFunction};
use crate::regress::fit_line;
use crate::setmodel::SetHandle;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_TOL: f64 = 0.15;
/// κ̂ growth slope (per refinement level) below which a family counts as flat.
pub const FLAT_SLOPE: f64 = 0.1;
/// Slope above which a family counts as blowing up.
pub const GROWTH_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prediction {
    Holds,
    /// Holds for every `f ∈ C₀^∞(ℝⁿ)`, not only for `f` vanishing on `E`.
    HoldsGlobal,
    /// Holds for `f ∈ C₀^∞(ℝⁿ)` vanishing on `E`.
    HoldsForVanishing,
    Fails,
    Unknown,
}

impl Prediction {
    pub fn holds(self) -> bool {
        matches!(self, Self::Holds | Self::HoldsGlobal | Self::HoldsForVanishing)
    }
}

/// Dimension inputs. Estimates are compared with margin `tol`; a known Hausdorff
/// dimension is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimInputs {
    pub assouad_upper: Option<f64>,
    pub assouad_lower: Option<f64>,
    pub minkowski_lower: Option<f64>,
    pub hausdorff: Option<f64>,
    pub tol: f64,
}

impl Default for DimInputs {
    fn default() -> Self {
        Self { assouad_upper: None, assouad_lower: None, minkowski_lower: None, hausdorff: None, tol: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SetFlags {
    pub porous: bool,
    pub compact: bool,
    /// `G^c = E` is unbounded. `G` itself is always unbounded here since `|E| = 0`.
    pub complement_unbounded: bool,
}

impl SetFlags {
    pub fn of(set: &SetHandle, porous: bool) -> Self {
        Self { porous, compact: set.bounded(), complement_unbounded: !set.bounded() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tri {
    Yes,
    No,
    /// Within the tolerance margin, or at exact equality.
    Margin,
}

impl Tri {
    fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::No, _) | (_, Tri::No) => Tri::No,
            (Tri::Margin, _) | (_, Tri::Margin) => Tri::Margin,
            _ => Tri::Yes,
        }
    }

    fn exact(b: bool) -> Tri {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rule: String,
    pub quantity: String,
    pub value: f64,
    pub relation: String,
    pub threshold: f64,
    pub tol: f64,
    pub outcome: Tri,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub prediction: Prediction,
    /// Id and statement of the deciding rule; empty when Unknown.
    pub rule: String,
    pub params: HardyParams,
    pub dims: DimInputs,
    pub flags: SetFlags,
    pub comparisons: Vec<Comparison>,
    /// Every rule whose hypotheses were met, in precedence order.
    pub fired: Vec<String>,
    /// Contradicting rules both fired; a global failure only contradicts a global hold.
    pub conflict: bool,
    pub caveats: Vec<String>,
}

/// Which inequality a rule speaks about: functions vanishing on `E`, or all of
/// `C₀^∞(ℝⁿ)`. A global failure does not contradict a holding inequality in `G`.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Scope {
    InG,
    Global,
}

struct Rule {
    id: &'static str,
    statement: &'static str,
    yields: Prediction,
    scope: Scope,
}

const RULES: [Rule; 8] = [
    Rule {
        id: "R1", statement: "dim_A(E) < min{(q/p)(n−p+β), n−1}", yields: Prediction::Holds, scope: Scope::InG
    },
    Rule {
        id: "R2",
        statement: "E porous, dim_A(E) < (q/p)(n−p+β), and dim_A(E) < n−1 or β ≤ (p−1)(qp+np−nq)/(qp+p−q)",
        yields: Prediction::HoldsGlobal,
        scope: Scope::Global,
    },
    Rule {
        id: "R3",
        statement: "β < p−1, ℓdim_A(E) > n−p+β, E unbounded",
        yields: Prediction::Holds,
        scope: Scope::InG,
    },
    Rule {
        id: "R4",
        statement: "β ≤ 0, p < q, ℓdim_A(E) > n−p+β, E unbounded",
        yields: Prediction::HoldsForVanishing,
        scope: Scope::InG,
    },
    Rule {
        id: "R7",
        statement: "β = 0 and dim_A(E) < (q/p)(n−p)",
        yields: Prediction::HoldsGlobal,
        scope: Scope::Global,
    },
    Rule {
        id: "R5",
        statement: "β ≥ 0, q(n−p+β)/p ≠ n, dim_A(E) ≥ (q/p)(n−p+β) and dim_H(E) < n−p+β",
        yields: Prediction::Fails,
        scope: Scope::InG,
    },
    Rule {
        id: "R6",
        statement: "β < 0, E compact and porous, dim_A(E) ≥ (q/p)(n−p+β) and ℓdim_M(E) < n−p+β",
        yields: Prediction::Fails,
        scope: Scope::InG,
    },
    Rule {
        id: "R7", statement: "β = 0 and dim_A(E) ≥ (q/p)(n−p)", yields: Prediction::Fails, scope: Scope::Global
    },
];

struct Ctx<'a> {
    dims: &'a DimInputs,
    comparisons: Vec<Comparison>,
    caveats: Vec<String>,
}

impl Ctx<'_> {
    /// `value < threshold` (`less`) or `value > threshold`, decided only outside `±tol`.
    fn cmp(&mut self, rule: &str, name: &str, value: Option<f64>, less: bool, threshold: f64, tol: f64) -> Tri {
        let Some(v) = value else {
            self.caveats.push(format!("{rule} needs {name}"));
            return Tri::No;
        };
        let outcome = if (v - threshold).abs() <= tol { Tri::Margin } else { Tri::exact((v < threshold) == less) };
        let relation = if less { "<" } else { ">" };
        self.comparisons.push(Comparison {
            rule: rule.into(),
            quantity: name.into(),
            value: v,
            relation: relation.into(),
            threshold,
            tol,
            outcome,
        });
        if outcome == Tri::Margin {
            self.caveats.push(format!("{rule}: {name} = {v:.3} is within {tol} of {threshold:.3}"));
        }
        outcome
    }

    fn upper(&mut self, rule: &str, less: bool, threshold: f64) -> Tri {
        let tol = self.dims.tol;
        self.cmp(rule, "dim_A", self.dims.assouad_upper, less, threshold, tol)
    }

    fn lower(&mut self, rule: &str, threshold: f64) -> Tri {
        let tol = self.dims.tol;
        self.cmp(rule, "ℓdim_A", self.dims.assouad_lower, false, threshold, tol)
    }

    /// `dim_H(E) < θ`, from metadata or the certificate `dim_H ≤ ℓdim_M`.
    fn hausdorff_below(&mut self, rule: &str, threshold: f64) -> Tri {
        if let Some(h) = self.dims.hausdorff {
            return self.cmp(rule, "dim_H (metadata)", Some(h), true, threshold, 0.0);
        }
        let tol = self.dims.tol;
        self.cmp(rule, "ℓdim_M", self.dims.minkowski_lower, true, threshold, tol)
    }
}

/// Evaluates every rule; the first that fires, in the order R1–R4, R7 (holds), R5, R6,
/// R7 (fails), decides. Parameters outside a rule's range make it inapplicable.
pub fn predict(params: &HardyParams, dims: &DimInputs, flags: &SetFlags) -> Verdict {
    let HardyParams { n, p, q, beta } = *params;
    let nf = n as f64;
    let ex = exponent_algebra(params);
    let p_star = ex.p_star;
    let thin = q / p * (nf - p + beta);
    let thick = nf - p + beta;
    let mut ctx = Ctx { dims, comparisons: Vec::new(), caveats: ex.warnings.clone() };
    let base = 1.0 <= p && p <= q && p < nf;
    let closed_range = base && q <= p_star * (1.0 + 1e-12);
    let open_range = base && q < p_star;
    let mut outcomes: Vec<Tri> = Vec::with_capacity(RULES.len());
    for rule in &RULES {
        let id = rule.id;
        let t = match (id, rule.yields) {
            ("R1", _) if closed_range => ctx.upper(id, true, thin.min(nf - 1.0)),
            ("R2", _) if closed_range && flags.porous => {
                let a = ctx.upper(id, true, thin);
                let side = if beta <= ex.extra_bound { Tri::Yes } else { ctx.upper(id, true, nf - 1.0) };
                a.and(side)
            }
            ("R3", _) if closed_range && p > 1.0 && beta < p - 1.0 && flags.complement_unbounded => {
                ctx.lower(id, thick)
            }
            ("R4", _) if open_range && p > 1.0 && p < q && beta <= 0.0 && n >= 2 && flags.complement_unbounded => {
                ctx.lower(id, thick)
            }
            ("R7", Prediction::HoldsGlobal) if open_range && beta == 0.0 => ctx.upper(id, true, thin),
            ("R5", _) if open_range && beta >= 0.0 => {
                if (thin - nf).abs() <= 1e-12 * nf {
                    ctx.caveats.push("R5 excluded: q(n−p+β)/p = n".into());
                    Tri::No
                } else {
                    let a = ctx.upper(id, false, thin);
                    a.and(ctx.hausdorff_below(id, thick))
                }
            }
            ("R6", _) if open_range && beta < 0.0 && flags.compact && flags.porous => {
                let a = ctx.upper(id, false, thin);
                let tol = dims.tol;
                a.and(ctx.cmp(id, "ℓdim_M", dims.minkowski_lower, true, thick, tol))
            }
            ("R7", Prediction::Fails) if open_range && beta == 0.0 => ctx.upper(id, false, thin),
            _ => Tri::No,
        };
        outcomes.push(t);
    }
    if !closed_range {
        ctx.caveats.push("parameters outside 1 ≤ p ≤ q ≤ np/(n−p), p < n: no rule applies".into());
    }
    let fired: Vec<&Rule> = RULES.iter().zip(&outcomes).filter(|(_, t)| **t == Tri::Yes).map(|(r, _)| r).collect();
    let conflict = fired.iter().any(|h| {
        h.yields.holds()
            && fired
                .iter()
                .any(|f| f.yields == Prediction::Fails && (f.scope == Scope::InG || h.scope == Scope::Global))
    });
    if conflict {
        ctx.caveats.push("rules disagree; the first in precedence is reported".into());
    }
    let (prediction, rule) = match fired.first() {
        Some(r) => (r.yields, format!("{}: {}", r.id, r.statement)),
        None => (Prediction::Unknown, String::new()),
    };
    if fired.iter().any(|r| r.scope == Scope::Global && r.yields == Prediction::Fails) {
        ctx.caveats.push("R7 fails: the inequality for all f ∈ C₀^∞(ℝⁿ), not only those vanishing on E, fails".into());
    }
    Verdict {
        prediction,
        rule,
        params: *params,
        dims: dims.clone(),
        flags: *flags,
        comparisons: ctx.comparisons,
        fired: fired.iter().map(|r| format!("{} ({:?})", r.id, r.yields)).collect(),
        conflict,
        caveats: ctx.caveats,
    }
}

/// κ̂ along one test-function family, indexed by refinement level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyTrend {
    pub family: String,
    /// `(level, κ̂)`.
    pub points: Vec<(f64, f64)>,
    /// Slope of `log₂ κ̂` against level; needs three points.
    pub slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
}

impl FamilyTrend {
    pub fn new(family: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        let logs: Vec<(f64, f64)> =
            points.iter().filter(|p| p.1 > 0.0 && p.1.is_finite()).map(|&(l, k)| (l, k.log2())).collect();
        let slope = if logs.len() >= 3 { fit_line(&logs).map(|f| f.slope) } else { None };
        Self { family: family.into(), points, slope, skipped: Vec::new() }
    }
}

/// Evaluates κ̂ for `(level, f)` pairs. Members whose integrals diverge are skipped.
pub fn family_trend(
    family: &str,
    members: Vec<(f64, TestFunction)>,
    set: &SetHandle,
    params: &HardyParams,
    cfg: &EvalConfig,
) -> Result<FamilyTrend> {
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (level, f) in members {
        match evaluate_functional(&f, set, params, cfg) {
            Ok(v) => match v.ratio {
                Some(k) => points.push((level, k)),
                None => skipped.push(format!("level {level}: zero right-hand side")),
            },
            Err(Error::Divergent(m)) => skipped.push(format!("level {level}: {m}")),
            Err(e) => return Err(e),
        }
    }
    let mut t = FamilyTrend::new(family, points);
    t.skipped = skipped;
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Consistency {
    Consistent,
    /// Prediction and evidence disagree; both numbers are in the report.
    Mismatch,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub status: Consistency,
    pub prediction: Prediction,
    pub max_slope: Option<f64>,
    pub slopes: Vec<(String, Option<f64>)>,
    pub notes: Vec<String>,
}

/// Holds-type predictions need every family flat (slope ≤ 0.1); Fails needs some family
/// growing (slope > 0.2). Unknown is consistent with any evidence.
pub fn cross_check(v: &Verdict, evidence: &[FamilyTrend]) -> ConsistencyReport {
    let slopes: Vec<(String, Option<f64>)> = evidence.iter().map(|t| (t.family.clone(), t.slope)).collect();
    let max_slope = evidence.iter().filter_map(|t| t.slope).reduce(f64::max);
    let mut notes = Vec::new();
    let status = match max_slope {
        None => {
            notes.push("no family has three finite κ̂ values".into());
            Consistency::Inconclusive
        }
        Some(m) => {
            let p = v.prediction;
            if p == Prediction::Unknown {
                Consistency::Consistent
            } else if p.holds() && m <= FLAT_SLOPE || p == Prediction::Fails && m > GROWTH_SLOPE {
                Consistency::Consistent
            } else if p.holds() && m > GROWTH_SLOPE || p == Prediction::Fails && m <= FLAT_SLOPE {
                notes.push(format!("{:?} by {} but max κ̂ slope {m:.3}", p, v.rule));
                Consistency::Mismatch
            } else {
                notes.push(format!("max κ̂ slope {m:.3} lies between {FLAT_SLOPE} and {GROWTH_SLOPE}"));
                Consistency::Inconclusive
            }
        }
    };
    ConsistencyReport { status, prediction: v.prediction, max_slope, slopes, notes }
}
