//! Closed-form waste of every strategy.
//!
//! For a fixed trust probability `q` (and proactive period `T_P`), each
//! waste function has the shape `a/T + b*T + c` in the regular period `T`,
//! except `Instant`, which is two such pieces joined at `T = 2 E_I^f`. The
//! coefficients are kept in a [`Curve`] so that evaluation and minimization
//! share one definition.

mod optimize;

pub use optimize::{
    dominance_nockpt, opt_period_exact, opt_period_tp, optimize_all, optimize_branch, optimize_strategy, Branch,
    OptimizedPlan, DEFAULT_ALPHA,
};

use crate::error::ModelError;
use crate::platform::{derive_rates, PlatformParams, PredictorParams, Seconds};
use crate::strategy::{proactive_periods, Strategy};

/// One waste evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WasteQuery {
    pub platform: PlatformParams,
    pub predictor: PredictorParams,
    pub period_tr: Seconds,
    pub period_tp: Option<Seconds>,
    pub alpha: f64,
    pub capped: bool,
}

impl WasteQuery {
    /// Uncapped query with the default `alpha`.
    pub fn new(platform: PlatformParams, predictor: PredictorParams, period_tr: Seconds) -> Self {
        WasteQuery {
            platform,
            predictor,
            period_tr,
            period_tp: None,
            alpha: DEFAULT_ALPHA,
            capped: false,
        }
    }

    pub fn with_tp(mut self, tp: Seconds) -> Self {
        self.period_tp = Some(tp);
        self
    }

    pub fn with_cap(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self.capped = true;
        self
    }

    fn mu(&self) -> f64 {
        self.platform.mtbf().get()
    }

    fn check(&self, q: f64, window: f64) -> Result<(), ModelError> {
        if !(0.0..=1.0).contains(&q) {
            return Err(ModelError::BadTrust(q));
        }
        let t = self.period_tr.get();
        let c = self.platform.ckpt().get();
        if t < c {
            return Err(ModelError::PeriodBelowCheckpoint { period: t, ckpt: c });
        }
        if self.capped {
            let (cap, window) = if q == 0.0 {
                (self.alpha * self.mu(), 0.0)
            } else {
                let rates = derive_rates(self.platform.mtbf(), &self.predictor);
                (self.alpha * rates.mu_e.get(), window)
            };
            if t + window > cap {
                return Err(ModelError::PeriodAboveCap { period: t, window, cap });
            }
        }
        Ok(())
    }
}

/// `a/T + b*T + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Curve {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Curve {
    pub fn eval(&self, t: f64) -> f64 {
        self.a / t + self.b * t + self.c
    }
}

/// What a window strategy does inside the window.
#[derive(Debug, Clone, Copy)]
pub(crate) enum InWindow {
    Checkpoints(f64),
    NoCheckpoint,
}

pub(crate) fn young_curve(pl: &PlatformParams) -> Curve {
    let mu = pl.mtbf().get();
    Curve {
        a: pl.ckpt().get(),
        b: 0.5 / mu,
        c: (pl.down().get() + pl.recovery().get()) / mu,
    }
}

pub(crate) fn exact_curve(pl: &PlatformParams, pr: &PredictorParams, q: f64) -> Curve {
    let mu = pl.mtbf().get();
    let (c, dr) = (pl.ckpt().get(), pl.down().get() + pl.recovery().get());
    let (r, p) = (pr.recall(), pr.precision());
    Curve {
        a: c,
        b: (1.0 - r * q) / (2.0 * mu),
        c: (dr + q * r / p * c) / mu,
    }
}

pub(crate) fn migration_curve(pl: &PlatformParams, pr: &PredictorParams, q: f64, m: f64) -> Curve {
    let mu = pl.mtbf().get();
    let (c, dr) = (pl.ckpt().get(), pl.down().get() + pl.recovery().get());
    let (r, p) = (pr.recall(), pr.precision());
    Curve {
        a: c,
        b: (1.0 - r * q) / (2.0 * mu),
        c: ((1.0 - r * q) * dr + q * r / p * m) / mu,
    }
}

/// Instant waste as two pieces: valid for `T <= 2E` and for `T >= 2E`.
pub(crate) fn instant_curves(pl: &PlatformParams, pr: &PredictorParams, q: f64) -> (Curve, Curve) {
    let mu = pl.mtbf().get();
    let qr = q * pr.recall();
    let base = exact_curve(pl, pr, q);
    let short = Curve {
        b: base.b + qr / (2.0 * mu),
        ..base
    };
    let long = Curve {
        c: base.c + qr * pr.mean_fault_offset().get() / mu,
        ..base
    };
    (short, long)
}

pub(crate) fn window_curve(pl: &PlatformParams, pr: &PredictorParams, q: f64, mode: InWindow) -> Curve {
    let rates = derive_rates(pl.mtbf(), pr);
    let (rp, rnp) = (rates.rate_p(), rates.rate_np());
    let (c, dr) = (pl.ckpt().get(), pl.down().get() + pl.recovery().get());
    let p = pr.precision();
    let e = pr.mean_fault_offset().get();
    // Fraction of time spent in proactive mode.
    let x = i_prime_at(pr, q).get() * rp;
    let in_window = match mode {
        InWindow::Checkpoints(tp) => x * c / tp + p * q * rp * tp,
        InWindow::NoCheckpoint => p * q * rp * e,
    };
    Curve {
        a: (1.0 - x) * c,
        b: (p * (1.0 - q) * rp + (1.0 - x) * rnp) / 2.0,
        c: q * rp * c + (p * rp + (1.0 - x) * rnp) * dr + in_window,
    }
}

/// Mean time spent in proactive mode per prediction,
/// `I' = q ((1 - p) I + p E_I^f)`, with `q` the predictor's trust.
pub fn i_prime(pred: &PredictorParams) -> Seconds {
    i_prime_at(pred, pred.trust())
}

pub(crate) fn i_prime_at(pred: &PredictorParams, q: f64) -> Seconds {
    let p = pred.precision();
    Seconds(q * ((1.0 - p) * pred.window().get() + p * pred.mean_fault_offset().get()))
}

/// Young's waste `C/T + (T/2 + D + R)/mu`.
pub fn waste_young(query: &WasteQuery) -> Result<f64, ModelError> {
    query.check(0.0, 0.0)?;
    Ok(young_curve(&query.platform).eval(query.period_tr.get()))
}

/// Waste with exactly dated predictions trusted with probability `q`.
pub fn waste_exact_date(query: &WasteQuery, q: f64) -> Result<f64, ModelError> {
    query.check(q, 0.0)?;
    Ok(exact_curve(&query.platform, &query.predictor, q).eval(query.period_tr.get()))
}

/// Waste when trusted predictions trigger a migration of cost `M`.
pub fn waste_migration(query: &WasteQuery, q: f64) -> Result<f64, ModelError> {
    let m = query.platform.migration().ok_or(ModelError::MissingMigrationCost)?;
    query.check(q, 0.0)?;
    Ok(migration_curve(&query.platform, &query.predictor, q, m.get()).eval(query.period_tr.get()))
}

/// Waste of `Instant`.
pub fn waste_instant(query: &WasteQuery, q: f64) -> Result<f64, ModelError> {
    query.check(q, query.predictor.window().get())?;
    let t = query.period_tr.get();
    let (short, long) = instant_curves(&query.platform, &query.predictor, q);
    let piece = if t / 2.0 <= query.predictor.mean_fault_offset().get() {
        short
    } else {
        long
    };
    Ok(piece.eval(t))
}

/// Waste of `NoCkptI`.
pub fn waste_nockpt(query: &WasteQuery, q: f64) -> Result<f64, ModelError> {
    query.check(q, query.predictor.window().get())?;
    Ok(window_curve(&query.platform, &query.predictor, q, InWindow::NoCheckpoint).eval(query.period_tr.get()))
}

/// Waste of `WithCkptI`; needs a proactive period `T_P` that splits the
/// window into whole periods no shorter than `C`.
pub fn waste_withckpt(query: &WasteQuery, q: f64) -> Result<f64, ModelError> {
    let tp = query.period_tp.ok_or(ModelError::MissingProactivePeriod)?;
    let window = query.predictor.window();
    if tp < query.platform.ckpt() || proactive_periods(window, tp).is_none() {
        return Err(ModelError::BadProactivePeriod {
            period: tp.get(),
            window: window.get(),
        });
    }
    query.check(q, window.get())?;
    Ok(window_curve(&query.platform, &query.predictor, q, InWindow::Checkpoints(tp.get())).eval(query.period_tr.get()))
}

/// Dispatches on `strategy`; Young ignores `q`.
pub fn waste(strategy: Strategy, query: &WasteQuery, q: f64) -> Result<f64, ModelError> {
    match strategy {
        Strategy::Young => waste_young(query),
        Strategy::ExactPrediction => waste_exact_date(query, q),
        Strategy::Migration => waste_migration(query, q),
        Strategy::Instant => waste_instant(query, q),
        Strategy::NoCkptI => waste_nockpt(query, q),
        Strategy::WithCkptI => waste_withckpt(query, q),
    }
}
