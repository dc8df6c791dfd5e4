//! Discrete-event execution of a job under a strategy, and replicate driver.
//!
//! A job is a fixed amount of fault-free, checkpoint-free compute time. It
//! ends once all of it is protected by a completed checkpoint, so every run
//! closes with a final checkpoint.

mod engine;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, SimError};
use crate::platform::{PlatformParams, PredictorParams, Seconds};
use crate::rng::replicate_seed;
use crate::strategy::{Strategy, StrategySpec};
use crate::trace::{FalseShape, LawKind, TraceConfig, TraceEvent, TraceStream};
use crate::waste::opt_period_tp;

pub use engine::NON_TERMINATION_FACTOR;

/// Base work for which the mean Young makespan on 2^16 processors under
/// Weibull(0.7) faults is 81.3 days (reference platform, 100 replicates,
/// base seed [`CALIBRATION_SEED`]).
pub const CALIBRATED_BASE_WORK: Seconds = Seconds(6_044_819.0);
pub const CALIBRATION_SEED: u64 = 2013;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JobSpec {
    base_work: Seconds,
}

impl JobSpec {
    pub fn new(base_work: Seconds) -> Result<Self, SimError> {
        if base_work.get() > 0.0 && base_work.get().is_finite() {
            Ok(JobSpec { base_work })
        } else {
            Err(SimError::BadBaseWork(base_work.get()))
        }
    }

    pub fn calibrated() -> Self {
        JobSpec {
            base_work: CALIBRATED_BASE_WORK,
        }
    }

    pub fn base_work(&self) -> Seconds {
        self.base_work
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Counters {
    pub faults_predicted: u64,
    pub faults_unpredicted: u64,
    pub true_predictions: u64,
    pub false_predictions: u64,
    /// Trusted and acted upon.
    pub predictions_trusted: u64,
    pub predictions_ignored: u64,
    /// Trusted while down, recovering or already handling a prediction.
    pub predictions_dropped: u64,
    pub regular_ckpts: u64,
    pub extra_ckpts: u64,
    pub proactive_ckpts: u64,
    /// Checkpoints interrupted by a fault.
    pub voided_ckpts: u64,
    pub rollbacks: u64,
    pub lost_work: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub makespan: f64,
    pub base_work: f64,
    pub lost_work: f64,
    pub ckpt_time: f64,
    pub down_time: f64,
    pub recovery_time: f64,
    pub idle_time: f64,
    pub counters: Counters,
}

impl SimOutcome {
    pub fn useful_work(&self) -> f64 {
        self.base_work
    }

    pub fn waste(&self) -> f64 {
        1.0 - self.base_work / self.makespan
    }

    /// Waste recomputed from the time accounting; agrees with [`Self::waste`]
    /// up to rounding.
    pub fn accounted_waste(&self) -> f64 {
        (self.lost_work + self.ckpt_time + self.down_time + self.recovery_time + self.idle_time) / self.makespan
    }

    pub fn faults(&self) -> u64 {
        self.counters.faults_predicted + self.counters.faults_unpredicted
    }
}

/// Runs `job` under `spec` against `events`. The trust stream of the policy
/// is derived from `seed`.
pub fn run<I>(
    job: &JobSpec,
    spec: &StrategySpec,
    platform: &PlatformParams,
    pred: &PredictorParams,
    events: I,
    seed: u64,
) -> Result<SimOutcome, SimError>
where
    I: IntoIterator<Item = TraceEvent>,
{
    engine::execute(job, spec, platform, pred, events, seed, None)
}

/// [`run`] writing one `<t> <event> <detail>` line per state change to `log`.
pub fn run_logged<I>(
    job: &JobSpec,
    spec: &StrategySpec,
    platform: &PlatformParams,
    pred: &PredictorParams,
    events: I,
    seed: u64,
    log: &mut dyn Write,
) -> Result<SimOutcome, SimError>
where
    I: IntoIterator<Item = TraceEvent>,
{
    engine::execute(job, spec, platform, pred, events, seed, Some(log))
}

/// Platform, predictor and fault laws shared by all replicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub platform: PlatformParams,
    pub predictor: PredictorParams,
    pub law: LawKind,
    pub false_shape: FalseShape,
}

impl Scenario {
    pub fn new(platform: PlatformParams, predictor: PredictorParams, law: LawKind) -> Self {
        Scenario {
            platform,
            predictor,
            law,
            false_shape: FalseShape::SameAsFaults,
        }
    }

    /// Trace configuration seen by `strategy`. Exactly dated predictions use
    /// the same faults and announcements with collapsed windows.
    pub fn trace_config(&self, strategy: Strategy) -> TraceConfig {
        let cfg = TraceConfig::new(self.law, &self.platform, &self.predictor).with_false_shape(self.false_shape);
        if strategy == Strategy::ExactPrediction {
            cfg.exact_dates()
        } else {
            cfg
        }
    }

    /// One replicate: trace and trust stream both derived from `seed`.
    pub fn run_one(&self, job: &JobSpec, spec: &StrategySpec, seed: u64) -> Result<SimOutcome, SimError> {
        let events = TraceStream::new(self.trace_config(spec.kind()), seed);
        run(job, spec, &self.platform, &self.predictor, events, seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateSummary {
    pub makespan_mean: f64,
    pub makespan_se: f64,
    pub waste_mean: f64,
    pub waste_se: f64,
    /// Per-replicate results, by replicate index.
    pub runs: Vec<SimOutcome>,
}

impl ReplicateSummary {
    fn from_runs(runs: Vec<SimOutcome>) -> Self {
        let (makespan_mean, makespan_se) = mean_se(runs.iter().map(|o| o.makespan));
        let (waste_mean, waste_se) = mean_se(runs.iter().map(|o| o.waste()));
        ReplicateSummary {
            makespan_mean,
            makespan_se,
            waste_mean,
            waste_se,
            runs,
        }
    }

    pub fn n_reps(&self) -> usize {
        self.runs.len()
    }
}

/// Mean and standard error, summed in iteration order.
fn mean_se(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs `n_reps` replicates in parallel; replicate `i` uses
/// `replicate_seed(base_seed, i)`, so the first `k` replicates do not depend
/// on `n_reps`.
pub fn run_replicates(
    job: &JobSpec,
    spec: &StrategySpec,
    scenario: &Scenario,
    n_reps: usize,
    base_seed: u64,
) -> Result<ReplicateSummary, SimError> {
    if n_reps == 0 {
        return Err(SimError::NoReplicates);
    }
    let runs = (0..n_reps as u64)
        .into_par_iter()
        .map(|i| scenario.run_one(job, spec, replicate_seed(base_seed, i)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ReplicateSummary::from_runs(runs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestPeriod {
    pub period: Seconds,
    pub summary: ReplicateSummary,
    /// Mean waste at each grid point.
    pub curve: Vec<(Seconds, f64)>,
}

/// Brute-force search of the regular period. Every grid point sees the same
/// replicate seeds.
pub fn best_period_search(
    job: &JobSpec,
    spec: &StrategySpec,
    scenario: &Scenario,
    grid: &[Seconds],
    n_reps: usize,
    base_seed: u64,
) -> Result<BestPeriod, SimError> {
    let ckpt = scenario.platform.ckpt().get();
    let mut best: Option<(Seconds, ReplicateSummary)> = None;
    let mut curve = Vec::with_capacity(grid.len());
    for &t in grid {
        if !(t.get() >= ckpt && t.get().is_finite()) {
            return Err(ModelError::PeriodBelowCheckpoint { period: t.get(), ckpt }.into());
        }
        let summary = run_replicates(job, &spec.with_period(t), scenario, n_reps, base_seed)?;
        curve.push((t, summary.waste_mean));
        if best.as_ref().is_none_or(|(_, b)| summary.waste_mean < b.waste_mean) {
            best = Some((t, summary));
        }
    }
    let (period, summary) = best.ok_or(SimError::EmptyGrid)?;
    Ok(BestPeriod { period, summary, curve })
}

/// The executable form of `kind` with the period used in simulations:
/// predictions always trusted, regular period `sqrt(2 mu C / (1 - r))`
/// (`sqrt(2 mu C)` for Young), proactive period from [`opt_period_tp`].
pub fn formula_spec(
    kind: Strategy,
    platform: &PlatformParams,
    pred: &PredictorParams,
) -> Result<StrategySpec, ModelError> {
    let mu = platform.mtbf().get();
    let c = platform.ckpt();
    let miss = if kind == Strategy::Young {
        1.0
    } else {
        1.0 - pred.recall()
    };
    if miss <= 0.0 {
        return Err(ModelError::InfinitePeriod);
    }
    let t = Seconds((2.0 * mu * c.get() / miss).sqrt().max(c.get()));
    let tp = if kind == Strategy::WithCkptI && pred.window().get() > 0.0 {
        Some(opt_period_tp(pred, c)?)
    } else {
        None
    };
    let pred = pred.with_trust(1.0).expect("1 is a valid trust");
    StrategySpec::new(kind, t, tp, 1.0, platform, &pred)
}

/// Base work for which the mean makespan of `spec` in `scenario` equals
/// `target`, by fixed-point iteration on `base * target / makespan`.
pub fn calibrate_base_work(
    target: Seconds,
    spec: &StrategySpec,
    scenario: &Scenario,
    n_reps: usize,
    base_seed: u64,
) -> Result<JobSpec, SimError> {
    let mut job = JobSpec::new(target)?;
    for _ in 0..6 {
        let mean = run_replicates(&job, spec, scenario, n_reps, base_seed)?.makespan_mean;
        let next = JobSpec::new(Seconds(job.base_work.get() * target.get() / mean))?;
        let done = (next.base_work.get() - job.base_work.get()).abs() <= 1e-4 * job.base_work.get();
        job = next;
        if done {
            break;
        }
    }
    Ok(job)
}

/// `n` geometrically spaced periods from `lo` to `hi` inclusive.
pub fn period_grid(lo: Seconds, hi: Seconds, n: usize) -> Vec<Seconds> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let ratio = (hi.get() / lo.get()).powf(1.0 / (n - 1) as f64);
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        Seconds(lo.get() * ratio.powi(i as i32))
                    }
                })
                .collect()
        }
    }
}
