use crate::args::{Cli, Command, HardyCommand, Kind, ParamArgs, StrategyArg};
use fhl::conditions::{
    a1_check, aikawa_check, aikawa_threshold, equiv_check, ps_check, CheckConfig, ConditionReport, Outcome,
};
use fhl::dimension::{
    estimate_assouad, estimate_minkowski, porosity_check, AssouadConfig, DimEstimate, MinkowskiConfig, PorosityConfig,
};
use fhl::gallery::{bundled_sets, run_gallery, GalleryConfig};
use fhl::geom::Bounds;
use fhl::hardy::{
    estimate_constant_with, evaluate_functional, family_axis_power, family_bump, family_radial_power, family_sphere_fj,
    family_tent, EvalConfig, HardyParams, OptimizeConfig, Strategy, TestFunction,
};
use fhl::report::{Meta, Report};
use fhl::setmodel::{build_set, SetHandle, SetSpec};
use fhl::verdict::{cross_check, family_trend, predict, DimInputs, Prediction, SetFlags, Verdict};
use fhl::whitney::{whitney_decompose, whitney_probe, whitney_validate, ProbeReport, Violation};
use fhl::{Error, Result};
use serde::Serialize;
use std::path::Path;

pub enum Status {
    Ok,
    /// A condition, prediction or gallery check failed.
    Failed,
}

struct Ctx<'a> {
    cli: &'a Cli,
    meta: Option<Meta>,
}

impl Ctx<'_> {
    fn emit<T: Serialize>(&self, kind: &str, result: T, csv: Option<String>) -> Result<()> {
        let text = Report::new(kind, self.meta.clone(), result).to_json()?;
        match &self.cli.global.out {
            Some(path) => {
                write(path, &text)?;
                if let Some(csv) = csv {
                    write(&path.with_extension("csv"), &csv)?;
                }
            }
            None => print!("{text}"),
        }
        Ok(())
    }

    fn set(&self, arg: &str) -> Result<SetHandle> {
        let spec = match bundled_sets().into_iter().find(|e| e.name == arg) {
            Some(e) => e.spec,
            None => {
                let text = std::fs::read_to_string(arg).map_err(|e| Error::Io(format!("{arg}: {e}")))?;
                SetSpec::from_json(&text)?
            }
        };
        build_set(&spec, self.cli.global.samples, self.cli.global.seed)
    }

    fn check_config(&self) -> CheckConfig {
        let mut cfg = CheckConfig { seed: self.cli.global.seed, ..Default::default() };
        if let Some(r) = self.cli.global.resolution {
            cfg.resolution = r;
        }
        cfg
    }

    fn eval_config(&self) -> EvalConfig {
        let mut cfg = EvalConfig::default();
        if let Some(r) = self.cli.global.resolution {
            cfg.resolution = r;
        }
        cfg
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn run(cli: &Cli, argv: Vec<String>) -> Result<Status> {
    if let Some(t) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    let meta = (!cli.global.no_meta).then(|| Meta::now(rayon::current_num_threads(), cli.global.seed, argv));
    let ctx = Ctx { cli, meta };
    match &cli.command {
        Command::Dim { set, kind, bx } => dim(&ctx, &ctx.set(&set.set)?, *kind, bx.as_deref()),
        Command::Aikawa { set, s, threshold } => {
            let e = ctx.set(&set.set)?;
            if *threshold {
                let t = aikawa_threshold(&e, 0.1, &ctx.check_config())?;
                ctx.emit("aikawa-threshold", t, None)?;
                Ok(Status::Ok)
            } else {
                let s = s.ok_or_else(|| Error::InvalidArgument("--s is required".into()))?;
                condition(&ctx, aikawa_check(&e, s, &ctx.check_config())?)
            }
        }
        Command::PsCheck { set, s } => condition(&ctx, ps_check(&ctx.set(&set.set)?, *s, &ctx.check_config())?),
        Command::EquivCheck { set, s, dim_a } => {
            let cfg = CheckConfig { dim_a: *dim_a, ..ctx.check_config() };
            condition(&ctx, equiv_check(&ctx.set(&set.set)?, *s, &cfg)?)
        }
        Command::A1Check { set, s } => condition(&ctx, a1_check(&ctx.set(&set.set)?, *s, &ctx.check_config())?),
        Command::Porosity { set } => {
            let r =
                porosity_check(&ctx.set(&set.set)?, &PorosityConfig { seed: cli.global.seed, ..Default::default() });
            let status = if r.porous { Status::Ok } else { Status::Failed };
            ctx.emit("porosity", r, None)?;
            Ok(status)
        }
        Command::Whitney { set, depth, bx } => whitney(&ctx, &ctx.set(&set.set)?, *depth, bx.as_deref()),
        Command::Hardy { action } => hardy(&ctx, action),
        Command::Verdict { set, params } => {
            let e = ctx.set(&set.set)?;
            let v = verdict(&ctx, &e, params)?;
            let status = if v.prediction == Prediction::Fails { Status::Failed } else { Status::Ok };
            ctx.emit("verdict", v, None)?;
            Ok(status)
        }
        Command::Gallery => {
            let cfg = GalleryConfig {
                seed: cli.global.seed,
                tol: cli.global.tol,
                sample_budget: cli.global.samples,
                ..Default::default()
            };
            let r = run_gallery(&cfg)?;
            let csv = r.checks.iter().fold("check,passed,detail\n".to_string(), |acc, c| {
                acc + &format!("{},{},\"{}\"\n", c.id, c.passed, c.detail.replace('"', "'"))
            });
            for c in r.failed_checks() {
                eprintln!("FAIL {}: {}", c.id, c.detail);
            }
            let status = if r.passed { Status::Ok } else { Status::Failed };
            ctx.emit("gallery", r, Some(csv))?;
            Ok(status)
        }
    }
}

fn condition(ctx: &Ctx, r: ConditionReport) -> Result<Status> {
    let status = if r.verdict == Outcome::Fail { Status::Failed } else { Status::Ok };
    let csv = r.profile_csv();
    ctx.emit("condition", r, Some(csv))?;
    Ok(status)
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("not a number: {t:?}"))))
        .collect()
}

fn parse_box(s: &str, n: usize) -> Result<Bounds> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| Error::InvalidArgument(format!("box {s:?} needs `lower:upper`")))?;
    let (lo, hi) = (parse_list(lo)?, parse_list(hi)?);
    if lo.len() != n || hi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: lo.len().max(hi.len()) });
    }
    Bounds::new(lo, hi)
}

/// Smallest cube around the bounding box, or the window for unbounded sets.
fn default_minkowski_box(set: &SetHandle) -> Bounds {
    match set.bbox() {
        Some((lo, hi)) if set.bounded() => {
            let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
            let half = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (b - a)).fold(0.0, f64::max);
            Bounds::cube(&center, if half > 0.0 { half * (1.0 + 1e-9) } else { 1.0 })
        }
        _ => set.window().clone(),
    }
}

/// Fewer scales in ℝ³, where fine boxes on a surface cost millions of samples.
fn minkowski_config(n: usize) -> MinkowskiConfig {
    if n >= 3 {
        MinkowskiConfig { k_min: 1, k_max: 7, window: 4 }
    } else {
        MinkowskiConfig::default()
    }
}

fn assouad_config(seed: u64) -> AssouadConfig {
    AssouadConfig { centers: 4, zoom_rounds: 3, seed, ..Default::default() }
}

fn dim(ctx: &Ctx, set: &SetHandle, kind: Kind, bx: Option<&str>) -> Result<Status> {
    let mut out: Vec<DimEstimate> = Vec::new();
    if matches!(kind, Kind::AssouadUpper | Kind::AssouadLower | Kind::All) {
        let (u, l) = estimate_assouad(set, &AssouadConfig { seed: ctx.cli.global.seed, ..Default::default() })?;
        match kind {
            Kind::AssouadUpper => out.push(u),
            Kind::AssouadLower => out.push(l),
            _ => out.extend([u, l]),
        }
    }
    if matches!(kind, Kind::MinkowskiUpper | Kind::MinkowskiLower | Kind::All) {
        let b = match bx {
            Some(s) => parse_box(s, set.dim())?,
            None => default_minkowski_box(set),
        };
        let (u, l) = estimate_minkowski(set, &b, &minkowski_config(set.dim()))?;
        match kind {
            Kind::MinkowskiUpper => out.push(u),
            Kind::MinkowskiLower => out.push(l),
            _ => out.extend([u, l]),
        }
    }
    let mut csv = Vec::new();
    for e in &out {
        e.write_profiles_csv(&mut csv)?;
    }
    let csv = String::from_utf8(csv).map_err(|e| Error::Io(e.to_string()))?;
    let mut slim = out;
    for e in &mut slim {
        e.profiles.clear();
    }
    ctx.emit("dimension", slim, Some(csv))?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct WhitneyResult {
    bounds: Bounds,
    cubes: usize,
    generations: Vec<(i32, usize)>,
    truncated_volume: f64,
    truncated_cubes: usize,
    violations: usize,
    /// First few violations.
    examples: Vec<Violation>,
    probe: ProbeReport,
}

fn whitney(ctx: &Ctx, set: &SetHandle, depth: u32, bx: Option<&str>) -> Result<Status> {
    let n = set.dim();
    let b = match bx {
        Some(s) => parse_box(s, n)?,
        None => Bounds::cube(&vec![0.0; n], 1.0),
    };
    let w = whitney_decompose(set, &b, depth)?;
    let violations = whitney_validate(&w.cubes, set);
    let probe = whitney_probe(&w, set, &b, 4096, ctx.cli.global.seed);
    let status = if violations.is_empty() && probe.passed() { Status::Ok } else { Status::Failed };
    let result = WhitneyResult {
        bounds: b,
        cubes: w.cubes.len(),
        generations: w.generation_counts(),
        truncated_volume: w.truncated_volume,
        truncated_cubes: w.truncated_cubes,
        violations: violations.len(),
        examples: violations.into_iter().take(10).collect(),
        probe,
    };
    ctx.emit("whitney", result, Some(w.to_csv()))?;
    Ok(status)
}

fn params_for(set: &SetHandle, a: &ParamArgs) -> Result<HardyParams> {
    let n = set.dim();
    if let Some(given) = a.n {
        if given != n {
            return Err(Error::DimensionMismatch { expected: n, got: given });
        }
    }
    Ok(HardyParams::new(n, a.p, a.q, a.beta))
}

/// Dimension estimates and flags feeding a prediction. A Hausdorff dimension in the
/// set's metadata replaces the Minkowski certificate.
fn verdict(ctx: &Ctx, set: &SetHandle, a: &ParamArgs) -> Result<Verdict> {
    let params = params_for(set, a)?;
    let (u, l) = estimate_assouad(set, &assouad_config(ctx.cli.global.seed))?;
    let minkowski_lower = if set.bounded() && set.hausdorff_dim().is_none() {
        estimate_minkowski(set, &default_minkowski_box(set), &minkowski_config(set.dim())).ok().map(|m| m.1.value)
    } else {
        None
    };
    let porous = porosity_check(set, &PorosityConfig { seed: ctx.cli.global.seed, ..Default::default() }).porous;
    let dims = DimInputs {
        assouad_upper: Some(u.value),
        assouad_lower: Some(l.value),
        minkowski_lower,
        hausdorff: set.hausdorff_dim(),
        tol: ctx.cli.global.tol,
    };
    Ok(predict(&params, &dims, &SetFlags::of(set, porous)))
}

fn center_and_radius(v: &[f64], n: usize, spec: &str) -> Result<(Vec<f64>, f64)> {
    match v.len() {
        2 => Ok((vec![v[0]; n], v[1])),
        k if k == n + 1 => Ok((v[..n].to_vec(), v[n])),
        _ => Err(Error::InvalidArgument(format!("{spec}: expected 2 or {} numbers", n + 1))),
    }
}

fn parse_family(spec: &str, n: usize) -> Result<TestFunction> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let v = if rest.is_empty() { Vec::new() } else { parse_list(rest)? };
    match name {
        "tent" => {
            let (c, r) = center_and_radius(&v, n, spec)?;
            family_tent(&c, r)
        }
        "bump" => {
            let (c, r) = center_and_radius(&v, n, spec)?;
            family_bump(&c, r)
        }
        "sphere-fj" => match v.as_slice() {
            [j] if *j >= 1.0 && j.fract() == 0.0 => family_sphere_fj(*j as u32, n, None),
            _ => Err(Error::InvalidArgument(format!("{spec}: expected sphere-fj:j"))),
        },
        "axis-power" => match v.as_slice() {
            [a] => family_axis_power(n, 0, *a, 1.0, 1.0),
            [a, radius, half] => family_axis_power(n, 0, *a, *radius, *half),
            _ => Err(Error::InvalidArgument(format!("{spec}: expected axis-power:a[,radius,half]"))),
        },
        "radial-power" => match v.as_slice() {
            [g, inner, outer] => family_radial_power(&vec![0.0; n], *g, *inner, *outer),
            _ => Err(Error::InvalidArgument(format!("{spec}: expected radial-power:γ,inner,outer"))),
        },
        _ => Err(Error::InvalidArgument(format!("unknown family {name:?}"))),
    }
}

fn parse_levels(s: &str) -> Result<(i32, i32)> {
    let bad = || Error::InvalidArgument(format!("levels {s:?} must look like 3..7"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let (a, b) = (a.trim().parse::<i32>().map_err(|_| bad())?, b.trim().parse::<i32>().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn hardy(ctx: &Ctx, action: &HardyCommand) -> Result<Status> {
    match action {
        HardyCommand::Eval { set, params, family } => {
            let e = ctx.set(&set.set)?;
            let params = params_for(&e, params)?;
            let f = parse_family(family, e.dim())?;
            let v = evaluate_functional(&f, &e, &params, &ctx.eval_config())?;
            ctx.emit("hardy-eval", v, None)?;
            Ok(Status::Ok)
        }
        HardyCommand::Optimize { set, params, strategy, budget } => {
            let e = ctx.set(&set.set)?;
            let params = params_for(&e, params)?;
            let strategy = match strategy {
                StrategyArg::FamilySweep => Strategy::FamilySweep,
                StrategyArg::GridAscent => Strategy::GridAscent,
            };
            let mut cfg = OptimizeConfig { eval: ctx.eval_config(), ..Default::default() };
            if let Some(r) = ctx.cli.global.resolution {
                cfg.grid = r;
            }
            let est = estimate_constant_with(&e, &params, strategy, *budget, ctx.cli.global.seed, &cfg)?;
            let csv = est.trace_csv();
            ctx.emit("hardy-optimize", est, Some(csv))?;
            Ok(Status::Ok)
        }
        HardyCommand::Counterexample { set, params, family, levels } => {
            let e = ctx.set(&set.set)?;
            let hp = params_for(&e, params)?;
            let n = e.dim();
            let (a, b) = match levels {
                Some(s) => parse_levels(s)?,
                None if family == "sphere-fj" => (3, 7),
                None => (1, 6),
            };
            let origin = vec![0.0; n];
            let members = (a..=b)
                .map(|k| {
                    let r = 2f64.powi(-k);
                    let f = match family.as_str() {
                        "sphere-fj" => family_sphere_fj(k.max(1) as u32, n, None),
                        "tent" => family_tent(&origin, r),
                        "bump" => family_bump(&origin, r),
                        "axis-power" => family_axis_power(n, 0, r, 1.0, 1.0),
                        _ => Err(Error::InvalidArgument(format!("unknown family {family:?}"))),
                    }?;
                    Ok((k as f64, f))
                })
                .collect::<Result<Vec<_>>>()?;
            let trend = family_trend(family, members, &e, &hp, &ctx.eval_config())?;
            let v = verdict(ctx, &e, params)?;
            let consistency = cross_check(&v, std::slice::from_ref(&trend));
            let csv = trend.points.iter().fold("level,kappa\n".to_string(), |acc, (l, k)| acc + &format!("{l},{k}\n"));
            #[derive(Serialize)]
            struct Out {
                trend: fhl::verdict::FamilyTrend,
                verdict: Verdict,
                consistency: fhl::verdict::ConsistencyReport,
            }
            ctx.emit("hardy-counterexample", Out { trend, verdict: v, consistency }, Some(csv))?;
            Ok(Status::Ok)
        }
    }
}
