use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

/// Fractal dimensions of closed sets and weighted Hardy–Sobolev inequalities on
/// their complements.
#[derive(Debug, Parser)]
#[command(name = "fhl", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    #[arg(long, global = true, env = "FHL_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "FHL_THREADS")]
    pub threads: Option<usize>,
    /// Quadrature cells per axis (checks) or grid resolution (hardy).
    #[arg(long, global = true, env = "FHL_RESOLUTION")]
    pub resolution: Option<usize>,
    /// Margin for dimension comparisons.
    #[arg(long, global = true, env = "FHL_TOL", default_value_t = 0.15)]
    pub tol: f64,
    /// Report path; a CSV, when there is one, goes next to it. Without it the
    /// report goes to stdout.
    #[arg(long, global = true, env = "FHL_OUT")]
    pub out: Option<PathBuf>,
    /// Exit with status 2 when a condition or prediction fails.
    #[arg(long, global = true, env = "FHL_STRICT")]
    pub strict: bool,
    /// Leave out version, timestamp, thread count and argv.
    #[arg(long, global = true, env = "FHL_NO_META")]
    pub no_meta: bool,
    /// Sample budget for sampled sets.
    #[arg(long, global = true, env = "FHL_SAMPLES", default_value_t = 1 << 14)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct SetArg {
    /// Set-spec JSON file, or the name of a bundled gallery set.
    #[arg(long)]
    pub set: String,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Ambient dimension; must match the set.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    AssouadUpper,
    AssouadLower,
    MinkowskiUpper,
    MinkowskiLower,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    FamilySweep,
    GridAscent,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assouad or Minkowski dimension estimate.
    Dim {
        #[command(flatten)]
        set: SetArg,
        #[arg(long, value_enum, default_value_t = Kind::All)]
        kind: Kind,
        /// Counting box for Minkowski, `x0,y0,..:x1,y1,..`.
        #[arg(long = "box")]
        bx: Option<String>,
    },
    /// Aikawa condition at `s`, or its bisected threshold.
    Aikawa {
        #[command(flatten)]
        set: SetArg,
        #[arg(long, required_unless_present = "threshold")]
        s: Option<f64>,
        #[arg(long)]
        threshold: bool,
    },
    /// Shell condition P(s).
    PsCheck {
        #[command(flatten)]
        set: SetArg,
        #[arg(long)]
        s: f64,
    },
    /// Comparability of `∫_B δ^{s−n}` with `r^s` and `|B|·δ(B)^{s−n}`.
    EquivCheck {
        #[command(flatten)]
        set: SetArg,
        #[arg(long)]
        s: f64,
        /// Known or estimated Assouad dimension for the precondition.
        #[arg(long)]
        dim_a: Option<f64>,
    },
    /// A₁ condition for `δ^{s−n}`.
    A1Check {
        #[command(flatten)]
        set: SetArg,
        #[arg(long)]
        s: f64,
    },
    /// Smallest hole constant over sampled balls centered on the set.
    Porosity {
        #[command(flatten)]
        set: SetArg,
    },
    /// Whitney decomposition of a box minus the set.
    Whitney {
        #[command(flatten)]
        set: SetArg,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        /// Box `x0,y0,..:x1,y1,..`; defaults to `[-1,1]ⁿ`.
        #[arg(long = "box")]
        bx: Option<String>,
    },
    /// Hardy–Sobolev quotient: evaluate, optimize, or follow a family.
    Hardy {
        #[command(subcommand)]
        action: HardyCommand,
    },
    /// Predicted status of the inequality from dimension estimates.
    Verdict {
        #[command(flatten)]
        set: SetArg,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Bundled sweep over the gallery sets.
    Gallery,
}

#[derive(Debug, Subcommand)]
pub enum HardyCommand {
    /// Both sides and κ̂ for one test function.
    Eval {
        #[command(flatten)]
        set: SetArg,
        #[command(flatten)]
        params: ParamArgs,
        /// `tent:c..,r`, `bump:c..,r`, `sphere-fj:j`, `axis-power:a[,radius,half]`,
        /// `radial-power:γ,inner,outer`. A single center coordinate is repeated.
        #[arg(long)]
        family: String,
    },
    /// Lower bound for the best constant.
    Optimize {
        #[command(flatten)]
        set: SetArg,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = StrategyArg::FamilySweep)]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 64)]
        budget: usize,
    },
    /// κ̂ along a refining family, with the prediction and a consistency check.
    Counterexample {
        #[command(flatten)]
        set: SetArg,
        #[command(flatten)]
        params: ParamArgs,
        /// `sphere-fj`, `tent`, `bump` or `axis-power`.
        #[arg(long)]
        family: String,
        /// Levels `a..b`; the family's default when absent.
        #[arg(long)]
        levels: Option<String>,
    },
}
