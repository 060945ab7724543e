//! Bundled sweep: dimension estimates, geometric conditions, Whitney summaries,
//! predictions over a parameter grid and κ̂ trends, each compared against its known
//! answer. The output depends only on the seed, never on the thread count.

use crate::conditions::{aikawa_threshold, ps_check, CheckConfig, Outcome};
use crate::dimension::{
    estimate_assouad, estimate_minkowski, porosity_check, AssouadConfig, MinkowskiConfig, PorosityConfig,
};
use crate::geom::Bounds;
use crate::hardy::{
    family_axis_power, family_bump, family_sphere_fj, family_tent, EvalConfig, HardyParams, TestFunction,
};
use crate::setmodel::{build_set, SetHandle, SetSpec};
use crate::verdict::{
    cross_check, family_trend, predict, ConsistencyReport, DimInputs, FamilyTrend, Prediction, SetFlags, Verdict,
};
use crate::whitney::{whitney_decompose, whitney_probe, whitney_validate};
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalleryConfig {
    pub seed: u64,
    pub tol: f64,
    /// Sample budget passed to [`build_set`].
    pub sample_budget: usize,
    pub whitney_depth: u32,
}

impl Default for GalleryConfig {
    fn default() -> Self {
        Self { seed: 0, tol: crate::verdict::DEFAULT_TOL, sample_budget: 1 << 14, whitney_depth: 8 }
    }
}

/// A bundled set with what is known about it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GallerySet {
    pub name: String,
    pub spec: SetSpec,
    /// Exact upper and lower Assouad dimensions.
    pub assouad: (f64, f64),
    pub minkowski: Option<f64>,
    /// Box for the Minkowski count.
    pub minkowski_box: Option<Bounds>,
}

fn entry(name: &str, spec: SetSpec, upper: f64, lower: f64) -> GallerySet {
    GallerySet { name: name.into(), spec, assouad: (upper, lower), minkowski: None, minkowski_box: None }
}

pub fn bundled_sets() -> Vec<GallerySet> {
    let cantor_dim = 2f64.ln() / 3f64.ln();
    let unit_strip = Bounds::new(vec![0.0, -0.5], vec![1.0, 0.5]).expect("valid box");
    vec![
        entry("line-r3", SetSpec::subspace(1, 3).with_hausdorff_dim(1.0), 1.0, 1.0),
        entry("sphere-r3", SetSpec::sphere(vec![0.0; 3], 1.0).with_hausdorff_dim(2.0), 2.0, 2.0),
        GallerySet {
            minkowski: Some(cantor_dim),
            minkowski_box: Some(unit_strip.clone()),
            ..entry("cantor", SetSpec::cantor().with_hausdorff_dim(cantor_dim), cantor_dim, cantor_dim)
        },
        GallerySet {
            minkowski: Some(0.5),
            minkowski_box: Some(unit_strip),
            ..entry("reciprocal", SetSpec::reciprocal().with_hausdorff_dim(0.0), 1.0, 0.0)
        },
        entry(
            "reciprocal-tiled-r3",
            SetSpec::tile(SetSpec::reciprocal().in_dim(3), vec![1.0, 0.0, 0.0]).with_hausdorff_dim(0.0),
            1.0,
            0.0,
        ),
        entry("origin-r3", SetSpec::points(vec![vec![0.0; 3]]).with_hausdorff_dim(0.0), 0.0, 0.0),
        entry("hyperplane-r2", SetSpec::subspace(1, 2).with_hausdorff_dim(1.0), 1.0, 1.0),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsRow {
    pub s: f64,
    pub verdict: Outcome,
    pub trend_slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetSummary {
    pub name: String,
    pub n: usize,
    pub bounded: bool,
    pub assouad_upper: f64,
    pub assouad_lower: f64,
    pub minkowski: Option<(f64, f64)>,
    pub porosity: f64,
    pub porous: bool,
    pub aikawa_threshold: Option<f64>,
    pub ps: Vec<PsRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitneySummary {
    pub name: String,
    pub depth: u32,
    pub cubes: usize,
    pub generations: Vec<(i32, usize)>,
    pub truncated_volume: f64,
    pub violations: usize,
    pub probes: usize,
    pub eligible: usize,
    pub uncovered: usize,
    pub repeated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub set: String,
    pub params: HardyParams,
    pub prediction: Prediction,
    pub rule: String,
    pub conflict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceRow {
    pub set: String,
    pub params: HardyParams,
    pub verdict: Verdict,
    pub trends: Vec<FamilyTrend>,
    pub consistency: ConsistencyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub detail: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalleryReport {
    pub config: GalleryConfig,
    pub sets: Vec<SetSummary>,
    pub whitney: Vec<WhitneySummary>,
    pub verdicts: Vec<VerdictRow>,
    pub evidence: Vec<EvidenceRow>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl GalleryReport {
    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

struct Built {
    entry: GallerySet,
    set: SetHandle,
    summary: SetSummary,
}

fn check(checks: &mut Vec<Check>, id: &str, passed: bool, detail: String) {
    checks.push(Check { id: id.into(), detail, passed });
}

fn summarize(entry: &GallerySet, cfg: &GalleryConfig) -> Result<Built> {
    let set = build_set(&entry.spec, cfg.sample_budget, cfg.seed)?;
    let acfg = AssouadConfig { centers: 4, zoom_rounds: 3, seed: cfg.seed, ..Default::default() };
    let (upper, lower) = estimate_assouad(&set, &acfg)?;
    let minkowski = match &entry.minkowski_box {
        Some(b) => {
            let (u, l) = estimate_minkowski(&set, b, &MinkowskiConfig::default())?;
            Some((u.value, l.value))
        }
        None => None,
    };
    let por = porosity_check(&set, &PorosityConfig { seed: cfg.seed, ..Default::default() });
    let ccfg = CheckConfig { seed: cfg.seed, ..Default::default() };
    let aikawa =
        if set.bounded() && set.diameter() > 0.0 { Some(aikawa_threshold(&set, 0.1, &ccfg)?.value) } else { None };
    let n = set.dim() as f64;
    let ps = if ["sphere-r3", "cantor", "hyperplane-r2"].contains(&entry.name.as_str()) {
        let mut rows = Vec::new();
        for s in [n - upper.value - 0.2, n - upper.value + 0.3] {
            let r = ps_check(&set, s, &ccfg)?;
            rows.push(PsRow { s, verdict: r.verdict, trend_slope: r.trend_slope });
        }
        rows
    } else {
        Vec::new()
    };
    let summary = SetSummary {
        name: entry.name.clone(),
        n: set.dim(),
        bounded: set.bounded(),
        assouad_upper: upper.value,
        assouad_lower: lower.value,
        minkowski,
        porosity: por.c,
        porous: por.porous,
        aikawa_threshold: aikawa,
        ps,
    };
    Ok(Built { entry: entry.clone(), set, summary })
}

fn dims_of(b: &Built, tol: f64) -> DimInputs {
    DimInputs {
        assouad_upper: Some(b.summary.assouad_upper),
        assouad_lower: Some(b.summary.assouad_lower),
        minkowski_lower: b.summary.minkowski.map(|m| m.1),
        hausdorff: b.set.hausdorff_dim(),
        tol,
    }
}

fn flags_of(b: &Built) -> SetFlags {
    SetFlags::of(&b.set, b.summary.porous)
}

fn whitney_summary(name: &str, spec: SetSpec, cfg: &GalleryConfig) -> Result<WhitneySummary> {
    let set = build_set(&spec, cfg.sample_budget, cfg.seed)?;
    let n = set.dim();
    let bx = Bounds::cube(&vec![0.0; n], 1.0);
    let w = whitney_decompose(&set, &bx, cfg.whitney_depth)?;
    let violations = whitney_validate(&w.cubes, &set).len();
    let probe = whitney_probe(&w, &set, &bx, 4096, cfg.seed);
    Ok(WhitneySummary {
        name: name.into(),
        depth: cfg.whitney_depth,
        cubes: w.cubes.len(),
        generations: w.generation_counts(),
        truncated_volume: w.truncated_volume,
        violations,
        probes: probe.probes,
        eligible: probe.eligible,
        uncovered: probe.uncovered,
        repeated: probe.repeated,
    })
}

type Members = Vec<(f64, TestFunction)>;

fn evidence(b: &Built, params: HardyParams, families: Vec<(&str, Members)>, tol: f64) -> Result<EvidenceRow> {
    let verdict = predict(&params, &dims_of(b, tol), &flags_of(b));
    let mut trends = Vec::new();
    for (name, members) in families {
        trends.push(family_trend(name, members, &b.set, &params, &EvalConfig::default())?);
    }
    let consistency = cross_check(&verdict, &trends);
    Ok(EvidenceRow { set: b.entry.name.clone(), params, verdict, trends, consistency })
}

fn levels(ks: std::ops::RangeInclusive<i32>, f: impl Fn(i32) -> Result<TestFunction>) -> Result<Members> {
    ks.map(|k| Ok((k as f64, f(k)?))).collect()
}

/// Runs the sweep. Entries run one after another; parallelism lives inside the
/// estimators, whose reductions are order-fixed.
pub fn run_gallery(cfg: &GalleryConfig) -> Result<GalleryReport> {
    let built: Vec<Built> = bundled_sets().iter().map(|e| summarize(e, cfg)).collect::<Result<_>>()?;
    let by_name = |name: &str| built.iter().find(|b| b.entry.name == name).expect("bundled set");
    let mut checks = Vec::new();

    for b in &built {
        let s = &b.summary;
        let (tu, tl) = b.entry.assouad;
        if b.entry.name != "reciprocal-tiled-r3" {
            let ok = (s.assouad_upper - tu).abs() <= cfg.tol;
            check(
                &mut checks,
                &format!("dim_a/{}", s.name),
                ok,
                format!("{:.3} vs {tu:.4} ± {}", s.assouad_upper, cfg.tol),
            );
        } else {
            let ok = s.assouad_lower <= tl + cfg.tol;
            check(
                &mut checks,
                &format!("ldim_a/{}", s.name),
                ok,
                format!("{:.3} ≤ {tl} + {}", s.assouad_lower, cfg.tol),
            );
        }
        if let (Some(m), Some((_, ml))) = (b.entry.minkowski, s.minkowski) {
            let ok = (ml - m).abs() <= 0.1;
            check(&mut checks, &format!("dim_m/{}", s.name), ok, format!("{ml:.3} vs {m:.4} ± 0.1"));
        }
        if let Some(t) = s.aikawa_threshold {
            let ok = (t - s.assouad_upper).abs() <= 0.2;
            check(
                &mut checks,
                &format!("aikawa/{}", s.name),
                ok,
                format!("threshold {t:.3} vs {:.3} ± 0.2", s.assouad_upper),
            );
        }
        if let [pass, fail] = s.ps.as_slice() {
            let ok = pass.verdict == Outcome::Pass && fail.verdict == Outcome::Fail;
            let detail = format!("s={:.3}: {:?}, s={:.3}: {:?}", pass.s, pass.verdict, fail.s, fail.verdict);
            check(&mut checks, &format!("ps/{}", s.name), ok, detail);
        }
    }

    let whitney = vec![
        whitney_summary("origin-r3", SetSpec::points(vec![vec![0.0; 3]]), cfg)?,
        whitney_summary("plane-r3", SetSpec::subspace(2, 3), cfg)?,
    ];
    for w in &whitney {
        let ok = w.violations == 0 && w.uncovered == 0 && w.repeated == 0;
        let detail =
            format!("{} cubes, {} violations, {}/{} probes uncovered", w.cubes, w.violations, w.uncovered, w.eligible);
        check(&mut checks, &format!("whitney/{}", w.name), ok, detail);
    }

    let mut verdicts = Vec::new();
    for b in &built {
        for p in [1.5, 2.0, 2.5] {
            for q in [p, 1.5 * p] {
                for beta in [-1.0, 0.0, 1.0, 2.0] {
                    let params = HardyParams::new(b.summary.n, p, q, beta);
                    let v = predict(&params, &dims_of(b, cfg.tol), &flags_of(b));
                    verdicts.push(VerdictRow {
                        set: b.entry.name.clone(),
                        params,
                        prediction: v.prediction,
                        rule: v.rule,
                        conflict: v.conflict,
                    });
                }
            }
        }
    }
    let conflicts = verdicts.iter().filter(|v| v.conflict).count();
    check(
        &mut checks,
        "verdict/no-conflicts",
        conflicts == 0,
        format!("{conflicts} of {} predictions conflict", verdicts.len()),
    );

    let origin = by_name("origin-r3");
    let sphere = by_name("sphere-r3");
    let line = by_name("line-r3");
    let evidence = vec![
        evidence(
            origin,
            HardyParams::new(3, 2.0, 2.0, 0.0),
            vec![("tent", levels(0..=4, |k| family_tent(&[0.0; 3], 2f64.powi(-k)))?)],
            cfg.tol,
        )?,
        evidence(
            sphere,
            HardyParams::new(3, 2.0, 2.0, 2.0),
            vec![("sphere-fj", levels(3..=7, |j| family_sphere_fj(j as u32, 3, None))?)],
            cfg.tol,
        )?,
        evidence(
            line,
            HardyParams::new(3, 2.0, 3.0, 0.0),
            vec![("bump", levels(2..=6, |k| family_bump(&[0.0; 3], 2f64.powi(-k)))?)],
            cfg.tol,
        )?,
        evidence(
            line,
            HardyParams::new(3, 2.0, 2.0, 0.0),
            vec![("axis-power", levels(1..=6, |k| family_axis_power(3, 0, 2f64.powi(-k), 1.0, 1.0))?)],
            cfg.tol,
        )?,
    ];
    let tent = &evidence[0].trends[0];
    let ok = tent.points.iter().all(|&(_, k)| (k - 1.0).abs() <= 0.03);
    check(&mut checks, "hardy/tent-origin", ok, format!("κ̂ {:?}", tent.points.iter().map(|p| p.1).collect::<Vec<_>>()));
    let fj = &evidence[1].trends[0];
    let steps: Vec<f64> = fj.points.windows(2).map(|w| w[1].1 / w[0].1).collect();
    let ok = fj.points.len() == 5 && steps.iter().all(|r| (1.2..=1.7).contains(r));
    check(&mut checks, "hardy/sphere-fj", ok, format!("step factors {steps:?}"));
    let flat = evidence[2].trends[0].slope;
    check(&mut checks, "hardy/line-bumps-flat", flat.is_some_and(|s| s.abs() <= 0.1), format!("slope {flat:?}"));
    let growth = evidence[3].trends[0].slope;
    check(&mut checks, "hardy/line-axis-growth", growth.is_some_and(|s| s >= 0.2), format!("slope {growth:?}"));
    for e in &evidence {
        let ok = e.consistency.status != crate::verdict::Consistency::Mismatch;
        check(&mut checks, &format!("cross-check/{}", e.set), ok, format!("{:?}", e.consistency.status));
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(GalleryReport {
        config: cfg.clone(),
        sets: built.into_iter().map(|b| b.summary).collect(),
        whitney,
        verdicts,
        evidence,
        checks,
        passed,
    })
}
