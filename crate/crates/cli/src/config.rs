//! Experiment files and their merge with command-line flags.
//!
//! ```toml
//! seed = 2013
//! reps = 100
//!
//! [platform]
//! n = [16384, 65536, 524288]
//! mtbf_ind = "125y"
//! c = "10mn"
//! d = "1mn"
//! r_rec = "10mn"
//!
//! [predictor]
//! recall = [0.85]
//! precision = [0.82]
//! window = ["300s", "3000s"]
//! window_law = "uniform"
//!
//! [run]
//! laws = ["exp", "weibull:0.7"]
//! strategies = ["Young", "ExactPrediction", "NoCkptI"]
//! best_period = false
//! ```
//!
//! Every key is optional; flags win over the file, the file over the
//! reference defaults.

use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use predckpt::experiment::{DEFAULT_REPS, FAST_REPS};
use predckpt::waste::DEFAULT_ALPHA;
use predckpt::{ExperimentPlan, JobSpec, PlatformParams, Seconds};

use crate::args::{PointArgs, RunArgs};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub alpha: Option<f64>,
    #[serde(default)]
    pub platform: PlatformSection,
    #[serde(default)]
    pub predictor: PredictorSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatformSection {
    pub n: Option<Vec<u64>>,
    pub mtbf_ind: Option<String>,
    pub c: Option<String>,
    pub d: Option<String>,
    pub r_rec: Option<String>,
    pub migration: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictorSection {
    pub recall: Option<Vec<f64>>,
    pub precision: Option<Vec<f64>>,
    pub window: Option<Vec<String>>,
    pub window_law: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub laws: Option<Vec<String>>,
    pub strategies: Option<Vec<String>>,
    pub best_period: Option<bool>,
    pub base_work: Option<String>,
    pub false_shape: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

fn parse<T>(key: &str, value: &str) -> Result<T>
where
    T: FromStr,
    T::Err: std::error::Error + Send + Sync + 'static,
{
    value.parse().with_context(|| format!("config key `{key}`"))
}

fn parse_all<T>(key: &str, values: &[String]) -> Result<Vec<T>>
where
    T: FromStr,
    T::Err: std::error::Error + Send + Sync + 'static,
{
    values.iter().map(|v| parse(key, v)).collect()
}

/// Flag list if given, else the file's list, else the default.
fn pick<T: Clone>(flag: &[T], file: Option<Vec<T>>, default: Vec<T>) -> Vec<T> {
    if !flag.is_empty() {
        flag.to_vec()
    } else {
        file.unwrap_or(default)
    }
}

fn duration(flag: Option<Seconds>, key: &str, file: &Option<String>, default: Seconds) -> Result<Seconds> {
    match (flag, file) {
        (Some(v), _) => Ok(v),
        (None, Some(s)) => parse(key, s),
        (None, None) => Ok(default),
    }
}

/// Reference plan, overridden by the file, overridden by the flags.
pub fn resolve_plan(file: &ConfigFile, point: &PointArgs, run: Option<&RunArgs>) -> Result<ExperimentPlan> {
    let mut plan = ExperimentPlan::reference();
    let base = plan.platform;
    let pl = &file.platform;
    plan.n_procs = pick(&point.n_procs, pl.n.clone(), plan.n_procs);
    let first_n = plan.n_procs.first().copied().unwrap_or(base.n_procs());
    let mut platform = PlatformParams::new(
        first_n,
        duration(point.mtbf_ind, "platform.mtbf_ind", &pl.mtbf_ind, base.mtbf_ind())?,
        duration(point.ckpt, "platform.c", &pl.c, base.ckpt())?,
        duration(point.down, "platform.d", &pl.d, base.down())?,
        duration(point.recovery, "platform.r_rec", &pl.r_rec, base.recovery())?,
    )?;
    let migration = match (point.migration, &pl.migration) {
        (Some(m), _) => Some(m),
        (None, Some(s)) => Some(parse("platform.migration", s)?),
        (None, None) => None,
    };
    if let Some(m) = migration {
        platform = platform.with_migration(m)?;
    }
    plan.platform = platform;

    let pr = &file.predictor;
    plan.recalls = pick(&point.recall, pr.recall.clone(), plan.recalls);
    plan.precisions = pick(&point.precision, pr.precision.clone(), plan.precisions);
    let windows = pr
        .window
        .as_deref()
        .map(|w| parse_all("predictor.window", w))
        .transpose()?;
    plan.windows = pick(&point.window, windows, plan.windows);
    plan.window_law = match (point.window_law, &pr.window_law) {
        (Some(l), _) => l,
        (None, Some(s)) => parse("predictor.window_law", s)?,
        (None, None) => plan.window_law,
    };

    plan.alpha = file.alpha.unwrap_or(DEFAULT_ALPHA);
    plan.base_seed = file.seed.unwrap_or(plan.base_seed);
    plan.n_reps = file.reps.unwrap_or(DEFAULT_REPS);

    let rs = &file.run;
    let laws = rs.laws.as_deref().map(|l| parse_all("run.laws", l)).transpose()?;
    let strategies = rs
        .strategies
        .as_deref()
        .map(|s| parse_all("run.strategies", s))
        .transpose()?;
    let empty = RunArgs::default();
    let run = run.unwrap_or(&empty);
    plan.laws = pick(&run.laws, laws, plan.laws);
    plan.strategies = pick(&run.strategies, strategies, plan.strategies);
    plan.best_period = rs.best_period.unwrap_or(false);
    if let Some(seed) = run.seed {
        plan.base_seed = seed;
    }
    if run.fast {
        plan.n_reps = FAST_REPS;
    } else if let Some(n) = run.reps {
        plan.n_reps = n;
    }
    let base_work = match (run.base_work, &rs.base_work) {
        (Some(w), _) => Some(w),
        (None, Some(s)) => Some(parse("run.base_work", s)?),
        (None, None) => None,
    };
    if let Some(w) = base_work {
        plan.job = JobSpec::new(w)?;
    }
    plan.false_shape = match (run.false_shape, &rs.false_shape) {
        (Some(f), _) => f,
        (None, Some(s)) => parse("run.false_shape", s)?,
        (None, None) => plan.false_shape,
    };

    if !(plan.alpha > 0.0 && plan.alpha.is_finite()) {
        bail!("alpha must be positive, got {}", plan.alpha);
    }
    plan.validate()?;
    plan.points()?;
    Ok(plan)
}
