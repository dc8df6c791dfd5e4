//! Sweep plans over platform and predictor parameters, and their results.

mod csv_io;

use serde::{Deserialize, Serialize};

use crate::error::{ExperimentError, ModelError};
use crate::platform::{PlatformParams, PredictorParams, Seconds, WindowLaw};
use crate::sim::{self, best_period_search, period_grid, run_replicates, JobSpec, ReplicateSummary, Scenario};
use crate::strategy::{Strategy, StrategySpec};
use crate::trace::{FalseShape, LawKind};
use crate::waste::{optimize_all, waste, OptimizedPlan, WasteQuery, DEFAULT_ALPHA};

pub use csv_io::{read_results, write_results, CsvHeader, SCHEMA_VERSION};

pub const DEFAULT_REPS: usize = 100;
pub const FAST_REPS: usize = 20;
pub const DEFAULT_SEED: u64 = 2013;

/// Grid points of a brute-force period search.
pub const BEST_PERIOD_POINTS: usize = 25;

/// Cartesian sweep over the listed axes.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    /// Platform template; its processor count is replaced by each `n_procs`.
    pub platform: PlatformParams,
    pub n_procs: Vec<u64>,
    pub recalls: Vec<f64>,
    pub precisions: Vec<f64>,
    pub windows: Vec<Seconds>,
    pub window_law: WindowLaw,
    pub laws: Vec<LawKind>,
    pub false_shape: FalseShape,
    pub strategies: Vec<Strategy>,
    /// Also run each strategy at its brute-force best period.
    pub best_period: bool,
    pub alpha: f64,
    pub n_reps: usize,
    pub base_seed: u64,
    pub job: JobSpec,
}

impl ExperimentPlan {
    /// Reference platform, accurate predictor, 300 s windows, Weibull(0.7),
    /// every simulated strategy on 2^14 ... 2^19 processors.
    pub fn reference() -> Self {
        ExperimentPlan {
            platform: PlatformParams::reference(1 << 16).expect("reference platform"),
            n_procs: (14..=19).map(|e| 1u64 << e).collect(),
            recalls: vec![0.85],
            precisions: vec![0.82],
            windows: vec![Seconds(300.0)],
            window_law: WindowLaw::UniformInWindow,
            laws: vec![LawKind::Weibull { shape: 0.7 }],
            false_shape: FalseShape::SameAsFaults,
            strategies: Strategy::SIMULATED.to_vec(),
            best_period: false,
            alpha: DEFAULT_ALPHA,
            n_reps: DEFAULT_REPS,
            base_seed: DEFAULT_SEED,
            job: JobSpec::calibrated(),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let axes: [(&'static str, bool); 6] = [
            ("n_procs", self.n_procs.is_empty()),
            ("recall", self.recalls.is_empty()),
            ("precision", self.precisions.is_empty()),
            ("window", self.windows.is_empty()),
            ("law", self.laws.is_empty()),
            ("strategy", self.strategies.is_empty()),
        ];
        if let Some((name, _)) = axes.into_iter().find(|(_, empty)| *empty) {
            return Err(ExperimentError::EmptyAxis(name));
        }
        if self.n_reps == 0 {
            return Err(ExperimentError::EmptyAxis("n_reps"));
        }
        Ok(())
    }

    /// Every (N, r, p, I) point of the sweep, for one law.
    pub fn points(&self) -> Result<Vec<Point>, ExperimentError> {
        let mut out = Vec::new();
        for &n in &self.n_procs {
            let platform = self.platform.with_procs(n)?;
            for &recall in &self.recalls {
                for &precision in &self.precisions {
                    for &window in &self.windows {
                        let predictor = PredictorParams::new(recall, precision, window, 1.0, self.window_law)?;
                        out.push(Point { platform, predictor });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// One coordinate of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub platform: PlatformParams,
    pub predictor: PredictorParams,
}

impl Point {
    pub fn describe(&self, law: LawKind) -> String {
        format!(
            "N={} r={} p={} I={} law={law}",
            self.platform.n_procs(),
            self.predictor.recall(),
            self.predictor.precision(),
            self.predictor.window()
        )
    }
}

/// One output line. Columns absent for a row kind are `None` (empty in CSV).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub strategy: String,
    pub n_procs: u64,
    pub mu_s: f64,
    pub recall: f64,
    pub precision: f64,
    pub window_s: f64,
    pub q: f64,
    pub capped: bool,
    pub t_r_s: f64,
    pub t_p_s: Option<f64>,
    pub waste_analytic: Option<f64>,
    pub waste_sim_mean: Option<f64>,
    pub waste_sim_se: Option<f64>,
    pub makespan_mean_s: Option<f64>,
    pub makespan_se_s: Option<f64>,
    pub gain_vs_young_pct: Option<f64>,
    pub n_reps: usize,
    pub seed: u64,
}

impl ResultRow {
    fn at(point: &Point, strategy: String, seed: u64) -> Self {
        ResultRow {
            strategy,
            n_procs: point.platform.n_procs(),
            mu_s: point.platform.mtbf().get(),
            recall: point.predictor.recall(),
            precision: point.predictor.precision(),
            window_s: point.predictor.window().get(),
            q: 0.0,
            capped: false,
            t_r_s: f64::NAN,
            t_p_s: None,
            waste_analytic: None,
            waste_sim_mean: None,
            waste_sim_se: None,
            makespan_mean_s: None,
            makespan_se_s: None,
            gain_vs_young_pct: None,
            n_reps: 0,
            seed,
        }
    }

    fn with_summary(mut self, s: &ReplicateSummary) -> Self {
        self.waste_sim_mean = Some(s.waste_mean);
        self.waste_sim_se = Some(s.waste_se);
        self.makespan_mean_s = Some(s.makespan_mean);
        self.makespan_se_s = Some(s.makespan_se);
        self.n_reps = s.n_reps();
        self
    }
}

/// Rows of one fault law.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultSet {
    pub law: LawKind,
    pub rows: Vec<ResultRow>,
    /// Strategy/point combinations that could not run, with the reason.
    pub skipped: Vec<String>,
}

/// Analytic plans at one point, as rows (no simulation columns).
pub fn analytic_rows(point: &Point, alpha: f64, seed: u64) -> Result<Vec<ResultRow>, ModelError> {
    let mut rows = Vec::new();
    for capped in [true, false] {
        for plan in optimize_all(&point.platform, &point.predictor, alpha, capped)? {
            rows.push(plan_row(point, &plan, seed));
        }
    }
    Ok(rows)
}

fn plan_row(point: &Point, plan: &OptimizedPlan, seed: u64) -> ResultRow {
    ResultRow {
        q: plan.q_star,
        capped: plan.capped,
        t_r_s: plan.t_r_star.as_f64(),
        t_p_s: plan.t_p_star.map(Seconds::get),
        waste_analytic: Some(plan.waste_star),
        ..ResultRow::at(point, plan.strategy.name().to_string(), seed)
    }
}

/// Uncapped closed-form waste of `spec` at `point`.
pub fn analytic_waste(point: &Point, spec: &StrategySpec) -> Result<f64, ModelError> {
    let mut query = WasteQuery::new(point.platform, point.predictor, spec.period_tr());
    if let Some(tp) = spec.period_tp() {
        query = query.with_tp(tp);
    }
    waste(spec.kind(), &query, spec.trust())
}

fn sim_error(point: &Point, law: LawKind, kind: &str, source: crate::error::SimError) -> ExperimentError {
    ExperimentError::Sim {
        coords: format!("{kind} {}", point.describe(law)),
        source,
    }
}

/// Simulates every strategy of the plan at `point` under `law`. Gains are
/// relative to a Young run with the same seeds, done here.
pub fn simulate_point(plan: &ExperimentPlan, point: &Point, law: LawKind) -> Result<ResultSet, ExperimentError> {
    let scenario = Scenario {
        false_shape: plan.false_shape,
        ..Scenario::new(point.platform, point.predictor, law)
    };
    let seed = plan.base_seed;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();

    let young_spec = sim::formula_spec(Strategy::Young, &point.platform, &point.predictor)?;
    let young = run_replicates(&plan.job, &young_spec, &scenario, plan.n_reps, seed)
        .map_err(|e| sim_error(point, law, "Young", e))?;
    let gain = |s: &ReplicateSummary| 100.0 * (1.0 - s.makespan_mean / young.makespan_mean);

    for &kind in &plan.strategies {
        if !kind.is_simulated() {
            skipped.push(format!("{kind} at {}: analytical model only", point.describe(law)));
            continue;
        }
        let spec = match sim::formula_spec(kind, &point.platform, &point.predictor) {
            Ok(s) => s,
            Err(e) => {
                skipped.push(format!("{kind} at {}: {e}", point.describe(law)));
                continue;
            }
        };
        let summary = if kind == Strategy::Young {
            young.clone()
        } else {
            run_replicates(&plan.job, &spec, &scenario, plan.n_reps, seed)
                .map_err(|e| sim_error(point, law, kind.name(), e))?
        };
        rows.push(
            ResultRow {
                q: spec.trust(),
                t_r_s: spec.period_tr().get(),
                t_p_s: spec.period_tp().map(Seconds::get),
                waste_analytic: Some(analytic_waste(point, &spec)?),
                gain_vs_young_pct: Some(gain(&summary)),
                ..ResultRow::at(point, kind.name().to_string(), seed)
            }
            .with_summary(&summary),
        );

        if plan.best_period {
            let ckpt = point.platform.ckpt();
            let hi = Seconds(spec.period_tr().get() * 4.0);
            let lo = Seconds((spec.period_tr().get() / 4.0).max(ckpt.get() * 1.05));
            let grid = period_grid(lo, hi, BEST_PERIOD_POINTS);
            let best = best_period_search(&plan.job, &spec, &scenario, &grid, plan.n_reps, seed)
                .map_err(|e| sim_error(point, law, kind.name(), e))?;
            rows.push(
                ResultRow {
                    q: spec.trust(),
                    t_r_s: best.period.get(),
                    t_p_s: spec.period_tp().map(Seconds::get),
                    gain_vs_young_pct: Some(gain(&best.summary)),
                    ..ResultRow::at(point, format!("BestPeriod-{kind}"), seed)
                }
                .with_summary(&best.summary),
            );
        }
    }
    Ok(ResultSet { law, rows, skipped })
}

/// Runs the whole plan, one [`ResultSet`] per law.
pub fn run_plan(plan: &ExperimentPlan) -> Result<Vec<ResultSet>, ExperimentError> {
    plan.validate()?;
    let points = plan.points()?;
    let mut out = Vec::new();
    for &law in &plan.laws {
        let mut set = ResultSet {
            law,
            rows: Vec::new(),
            skipped: Vec::new(),
        };
        for point in &points {
            let part = simulate_point(plan, point, law)?;
            set.rows.extend(part.rows);
            set.skipped.extend(part.skipped);
        }
        out.push(set);
    }
    Ok(out)
}
