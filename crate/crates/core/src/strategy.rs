//! Checkpointing strategies and their reaction to predictions.
//!
//! The simulator owns the clock and the work counters; this module owns the
//! decisions: whether a prediction is trusted, what to do when one arrives,
//! and how to behave inside a prediction window.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, ParseError};
use crate::platform::{PlatformParams, PredictorParams, Seconds};
use crate::rng::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    /// Periodic checkpointing, predictions ignored.
    Young,
    /// Extra checkpoint just before each trusted, exactly dated prediction.
    ExactPrediction,
    /// Migrate away from the predicted node instead of checkpointing.
    /// Analytical model only.
    Migration,
    /// Extra checkpoint before the window, then regular mode right away.
    Instant,
    /// Extra checkpoint before the window, no checkpoint inside it.
    NoCkptI,
    /// Extra checkpoint before the window, period `T_P` inside it.
    WithCkptI,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Young,
        Strategy::ExactPrediction,
        Strategy::Migration,
        Strategy::Instant,
        Strategy::NoCkptI,
        Strategy::WithCkptI,
    ];

    /// Strategies the simulator can execute.
    pub const SIMULATED: [Strategy; 5] = [
        Strategy::Young,
        Strategy::ExactPrediction,
        Strategy::Instant,
        Strategy::NoCkptI,
        Strategy::WithCkptI,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Young => "Young",
            Strategy::ExactPrediction => "ExactPrediction",
            Strategy::Migration => "Migration",
            Strategy::Instant => "Instant",
            Strategy::NoCkptI => "NoCkptI",
            Strategy::WithCkptI => "WithCkptI",
        }
    }

    pub fn uses_predictions(self) -> bool {
        self != Strategy::Young
    }

    /// Whether predictions come with a window of length `I` (as opposed to
    /// exact dates).
    pub fn uses_window(self) -> bool {
        matches!(self, Strategy::Instant | Strategy::NoCkptI | Strategy::WithCkptI)
    }

    pub fn is_simulated(self) -> bool {
        self != Strategy::Migration
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        Strategy::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(t))
            .or(match t.to_ascii_lowercase().as_str() {
                "exact" => Some(Strategy::ExactPrediction),
                "nockpt" => Some(Strategy::NoCkptI),
                "withckpt" => Some(Strategy::WithCkptI),
                _ => None,
            })
            .ok_or_else(|| ParseError::Strategy(s.to_string()))
    }
}

/// A fully specified, executable strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategySpec {
    kind: Strategy,
    period_tr: Seconds,
    period_tp: Option<Seconds>,
    trust: f64,
}

/// `I / T_P` rounded, when it is a positive integer up to rounding noise.
pub(crate) fn proactive_periods(window: Seconds, tp: Seconds) -> Option<u64> {
    let k = window.get() / tp.get();
    let n = k.round();
    (n >= 1.0 && (k - n).abs() <= 1e-9 * n).then_some(n as u64)
}

impl StrategySpec {
    /// Validates a strategy against the platform and predictor it will run
    /// with.
    pub fn new(
        kind: Strategy,
        period_tr: Seconds,
        period_tp: Option<Seconds>,
        trust: f64,
        platform: &PlatformParams,
        pred: &PredictorParams,
    ) -> Result<Self, ModelError> {
        let c = platform.ckpt();
        if !kind.is_simulated() {
            return Err(ModelError::NotSimulated(kind.name()));
        }
        if !(period_tr.get() >= c.get() && period_tr.get().is_finite()) {
            return Err(ModelError::PeriodBelowCheckpoint {
                period: period_tr.get(),
                ckpt: c.get(),
            });
        }
        if !(0.0..=1.0).contains(&trust) {
            return Err(ModelError::BadTrust(trust));
        }
        let window = pred.window();
        let period_tp = if kind == Strategy::WithCkptI && window.get() > 0.0 {
            if window.get() < c.get() {
                return Err(ModelError::WindowBelowCheckpoint {
                    window: window.get(),
                    ckpt: c.get(),
                });
            }
            let tp = period_tp.ok_or(ModelError::MissingProactivePeriod)?;
            if tp.get() < c.get() || proactive_periods(window, tp).is_none() {
                return Err(ModelError::BadProactivePeriod {
                    period: tp.get(),
                    window: window.get(),
                });
            }
            Some(tp)
        } else {
            None
        };
        let trust = if kind == Strategy::Young { 0.0 } else { trust };
        Ok(StrategySpec {
            kind,
            period_tr,
            period_tp,
            trust,
        })
    }

    pub fn young(period_tr: Seconds, platform: &PlatformParams) -> Result<Self, ModelError> {
        Self::new(
            Strategy::Young,
            period_tr,
            None,
            0.0,
            platform,
            &PredictorParams::none(),
        )
    }

    pub fn kind(&self) -> Strategy {
        self.kind
    }
    pub fn period_tr(&self) -> Seconds {
        self.period_tr
    }
    pub fn period_tp(&self) -> Option<Seconds> {
        self.period_tp
    }
    pub fn trust(&self) -> f64 {
        self.trust
    }

    /// Same strategy with another regular period.
    pub fn with_period(&self, period_tr: Seconds) -> Self {
        StrategySpec { period_tr, ..*self }
    }
}

/// What the job is doing when a prediction is announced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Situation {
    /// Computing in regular mode with `unprotected` seconds of work since the
    /// last completed checkpoint.
    RegularWork { unprotected: f64 },
    /// Inside a regular checkpoint.
    RegularCheckpoint,
    /// Already reacting to an earlier prediction (extra checkpoint, waiting
    /// for a window, or inside a window).
    Busy,
    /// Down or recovering after a fault.
    Recovering,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionAction {
    /// Not trusted: carry on.
    Ignore,
    /// Trusted but cannot be acted upon in the current situation.
    Drop,
    /// Checkpoint now; the checkpoint ends exactly at the window start.
    ExtraCheckpoint,
    /// No room for an extra checkpoint: stay idle until the window start
    /// (after the running checkpoint, if any).
    WaitForWindow,
}

/// Behavior inside a trusted prediction window `[t, t + I]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProactivePlan {
    /// Resume regular mode at `t`.
    Resume,
    /// Compute without checkpointing until `t + I`.
    NoCheckpoint { until: f64 },
    /// `count` periods of `period - C` work followed by a checkpoint.
    Periodic { period: f64, count: u64 },
}

/// Per-run policy state. Owns the trust stream, so one `PolicyState` serves
/// exactly one run.
#[derive(Debug, Clone)]
pub struct PolicyState {
    spec: StrategySpec,
    window: f64,
    trust_rng: ChaCha8Rng,
}

impl PolicyState {
    pub fn new(spec: StrategySpec, pred: &PredictorParams, seed: u64) -> Self {
        PolicyState {
            spec,
            window: pred.window().get(),
            trust_rng: rng::stream(seed, Stream::Trust),
        }
    }

    pub fn spec(&self) -> &StrategySpec {
        &self.spec
    }

    /// Decides how to react to a prediction. Draws exactly one trust value
    /// per call.
    pub fn on_prediction(&mut self, situation: Situation) -> PredictionAction {
        let u: f64 = self.trust_rng.random();
        if u >= self.spec.trust {
            return PredictionAction::Ignore;
        }
        match situation {
            Situation::RegularWork { unprotected } if unprotected > 0.0 => PredictionAction::ExtraCheckpoint,
            Situation::RegularWork { .. } | Situation::RegularCheckpoint => PredictionAction::WaitForWindow,
            Situation::Busy | Situation::Recovering => PredictionAction::Drop,
        }
    }

    /// Plan for the window starting at `t`.
    pub fn on_enter_proactive(&self, t: f64) -> ProactivePlan {
        if self.window == 0.0 {
            return ProactivePlan::Resume;
        }
        match self.spec.kind {
            Strategy::NoCkptI => ProactivePlan::NoCheckpoint { until: t + self.window },
            Strategy::WithCkptI => {
                let tp = self.spec.period_tp.expect("validated WithCkptI spec");
                let count = proactive_periods(Seconds(self.window), tp).expect("validated T_P");
                ProactivePlan::Periodic {
                    period: tp.get(),
                    count,
                }
            }
            _ => ProactivePlan::Resume,
        }
    }
}
