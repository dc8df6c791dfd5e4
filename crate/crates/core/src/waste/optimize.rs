//! Period optimizers.
//!
//! Every waste function is affine in `q`, so only `q = 0` and `q = 1` need
//! to be examined. For each branch the regular period minimizes a curve
//! `a/T + b*T + c` over `[C, cap]`, where `cap` is infinite in uncapped mode.

use std::cmp::Ordering;

use crate::error::ModelError;
use crate::platform::{derive_rates, ExtSeconds, PlatformParams, PredictorParams, Seconds};
use crate::strategy::{Strategy, StrategySpec};

use super::{exact_curve, instant_curves, migration_curve, window_curve, young_curve, Curve, InWindow};

pub const DEFAULT_ALPHA: f64 = 0.27;

/// Optimal period of one `q` branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub q: f64,
    pub t_r: ExtSeconds,
    pub t_p: Option<Seconds>,
    /// Raw formula value, possibly above 1.
    pub waste: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizedPlan {
    pub strategy: Strategy,
    /// 0 or 1.
    pub q_star: f64,
    /// Infinite for a checkpoint-free plan.
    pub t_r_star: ExtSeconds,
    pub t_p_star: Option<Seconds>,
    /// Waste clamped to `[0, 1]`.
    pub waste_star: f64,
    pub waste_raw: f64,
    pub capped: bool,
    /// False when no admissible period exists in capped mode.
    pub feasible: bool,
}

impl OptimizedPlan {
    pub fn is_checkpoint_free(&self) -> bool {
        self.t_r_star.is_infinite()
    }

    /// Executable spec for the simulator.
    pub fn to_spec(&self, platform: &PlatformParams, pred: &PredictorParams) -> Result<StrategySpec, ModelError> {
        let t = self.t_r_star.finite().ok_or(ModelError::InfinitePeriod)?;
        StrategySpec::new(self.strategy, t, self.t_p_star, self.q_star, platform, pred)
    }
}

/// Minimizes `curve` over `[lo, hi]`; `None` if the interval is empty.
fn minimize(curve: Curve, lo: f64, hi: f64) -> Option<(ExtSeconds, f64)> {
    if !(lo <= hi) {
        return None;
    }
    let mut best: Option<(ExtSeconds, f64)> = None;
    let mut consider = |t: ExtSeconds, w: f64| {
        if best.is_none_or(|(_, bw)| w < bw) {
            best = Some((t, w));
        }
    };
    if curve.a > 0.0 && curve.b > 0.0 {
        let t = (curve.a / curve.b).sqrt().clamp(lo, hi);
        consider(ExtSeconds::Finite(Seconds(t)), curve.eval(t));
    }
    if hi.is_infinite() && curve.b == 0.0 && curve.a >= 0.0 {
        consider(ExtSeconds::Infinite, curve.c);
    }
    consider(ExtSeconds::Finite(Seconds(lo)), curve.eval(lo));
    if hi.is_finite() {
        consider(ExtSeconds::Finite(Seconds(hi)), curve.eval(hi));
    }
    best
}

/// Optimal `T_P`: the divisor of the window closest to
/// `sqrt(K C)`, `K = ((1 - p) I + p E_I^f) / p`, on either side.
pub fn opt_period_tp(pred: &PredictorParams, ckpt: Seconds) -> Result<Seconds, ModelError> {
    let i = pred.window().get();
    let c = ckpt.get();
    if i < c || i == 0.0 {
        return Err(ModelError::WindowBelowCheckpoint { window: i, ckpt: c });
    }
    let k = proactive_k(pred);
    let cost = |tp: f64| k * c / tp + tp;
    let extr = (k * c).sqrt();
    let n = (i / extr).floor();
    let candidates: &[f64] = if n < 1.0 { &[i] } else { &[i / n, i / (n + 1.0)] };
    let best = candidates
        .iter()
        .copied()
        .filter(|&tp| tp >= c)
        .min_by(|a, b| cost(*a).partial_cmp(&cost(*b)).unwrap_or(Ordering::Equal));
    // Both candidates below C: the shortest whole split of the window that is
    // still at least C long.
    Ok(Seconds(best.unwrap_or_else(|| i / (i / c).floor())))
}

fn proactive_k(pred: &PredictorParams) -> f64 {
    let p = pred.precision();
    ((1.0 - p) * pred.window().get() + p * pred.mean_fault_offset().get()) / p
}

/// Whether skipping checkpoints inside the window is at least as good as
/// checkpointing with the unrounded optimal `T_P`: `2 sqrt(K C) >= E_I^f`.
pub fn dominance_nockpt(pred: &PredictorParams, ckpt: Seconds) -> bool {
    2.0 * (proactive_k(pred) * ckpt.get()).sqrt() >= pred.mean_fault_offset().get()
}

/// Optimal regular period of one `q` branch of `strategy`. `Ok(None)` when
/// the capped domain is empty.
pub fn optimize_branch(
    strategy: Strategy,
    platform: &PlatformParams,
    pred: &PredictorParams,
    q: f64,
    alpha: f64,
    capped: bool,
) -> Result<Option<Branch>, ModelError> {
    if !(0.0..=1.0).contains(&q) {
        return Err(ModelError::BadTrust(q));
    }
    let q = if strategy == Strategy::Young { 0.0 } else { q };
    let c = platform.ckpt().get();
    let window = if strategy.uses_window() {
        pred.window().get()
    } else {
        0.0
    };
    let hi = if !capped {
        f64::INFINITY
    } else if q == 0.0 {
        alpha * platform.mtbf().get()
    } else {
        alpha * derive_rates(platform.mtbf(), pred).mu_e.get() - window
    };

    let mut t_p = None;
    let best = match strategy {
        Strategy::Young => minimize(young_curve(platform), c, hi),
        Strategy::ExactPrediction => minimize(exact_curve(platform, pred, q), c, hi),
        Strategy::Migration => {
            let m = platform.migration().ok_or(ModelError::MissingMigrationCost)?;
            minimize(migration_curve(platform, pred, q, m.get()), c, hi)
        }
        Strategy::Instant => {
            let (short, long) = instant_curves(platform, pred, q);
            let knee = 2.0 * pred.mean_fault_offset().get();
            let a = minimize(short, c, hi.min(knee));
            let b = minimize(long, c.max(knee), hi);
            match (a, b) {
                (Some(x), Some(y)) => Some(if y.1 < x.1 { y } else { x }),
                (x, y) => x.or(y),
            }
        }
        Strategy::NoCkptI => minimize(window_curve(platform, pred, q, InWindow::NoCheckpoint), c, hi),
        Strategy::WithCkptI => {
            let tp = opt_period_tp(pred, platform.ckpt())?;
            t_p = Some(tp);
            minimize(window_curve(platform, pred, q, InWindow::Checkpoints(tp.get())), c, hi)
        }
    };
    Ok(best.map(|(t_r, waste)| Branch { q, t_r, t_p, waste }))
}

/// Best of the `q = 0` and `q = 1` branches. Ties go to `q = 0`.
pub fn optimize_strategy(
    strategy: Strategy,
    platform: &PlatformParams,
    pred: &PredictorParams,
    alpha: f64,
    capped: bool,
) -> Result<OptimizedPlan, ModelError> {
    let b0 = optimize_branch(strategy, platform, pred, 0.0, alpha, capped)?;
    let b1 = if strategy == Strategy::Young {
        None
    } else {
        optimize_branch(strategy, platform, pred, 1.0, alpha, capped)?
    };
    let chosen = match (b0, b1) {
        (Some(x), Some(y)) => {
            if y.waste < x.waste - 1e-12 * x.waste.abs() {
                Some(y)
            } else {
                Some(x)
            }
        }
        (x, y) => x.or(y),
    };
    Ok(match chosen {
        Some(b) => OptimizedPlan {
            strategy,
            q_star: b.q,
            t_r_star: b.t_r,
            t_p_star: b.t_p,
            waste_star: b.waste.clamp(0.0, 1.0),
            waste_raw: b.waste,
            capped,
            feasible: true,
        },
        None => OptimizedPlan {
            strategy,
            q_star: 0.0,
            t_r_star: ExtSeconds::Finite(platform.ckpt()),
            t_p_star: None,
            waste_star: 1.0,
            waste_raw: 1.0,
            capped,
            feasible: false,
        },
    })
}

/// Optimal plan of the exact-date strategy.
pub fn opt_period_exact(platform: &PlatformParams, pred: &PredictorParams, alpha: f64, capped: bool) -> OptimizedPlan {
    optimize_strategy(Strategy::ExactPrediction, platform, pred, alpha, capped)
        .expect("exact-date optimization has no failure mode")
}

/// Plans for every applicable strategy, best first. Migration needs a
/// migration cost; `WithCkptI` needs `I >= C` and is skipped when
/// [`dominance_nockpt`] holds.
pub fn optimize_all(
    platform: &PlatformParams,
    pred: &PredictorParams,
    alpha: f64,
    capped: bool,
) -> Result<Vec<OptimizedPlan>, ModelError> {
    let c = platform.ckpt();
    let mut plans = Vec::new();
    for s in Strategy::ALL {
        let applicable = match s {
            Strategy::Migration => platform.migration().is_some(),
            Strategy::WithCkptI => pred.window() >= c && !dominance_nockpt(pred, c),
            _ => true,
        };
        if applicable {
            plans.push(optimize_strategy(s, platform, pred, alpha, capped)?);
        }
    }
    plans.sort_by(|a, b| a.waste_raw.partial_cmp(&b.waste_raw).unwrap_or(Ordering::Equal));
    Ok(plans)
}
