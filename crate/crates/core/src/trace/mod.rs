//! Synthetic fault and prediction traces.
//!
//! Faults follow a renewal process whose mean is the platform MTBF. Each
//! fault is predicted with probability `r`; a predicted fault becomes a
//! prediction whose window `[t0, t0 + I]` contains it, announced exactly
//! `lead` seconds before `t0`. False predictions form a second renewal
//! process with mean `p mu / (r (1 - p))`. Events are ordered by
//! announcement time, ties broken by kind (unpredicted fault, true
//! prediction, false prediction) and then by generation index.

mod io;
mod law;
mod stream;

pub use io::{read_trace, write_trace};
pub use law::{gamma, FailureLaw, LawKind, Sampler};
pub use stream::TraceStream;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ParseError;
use crate::platform::{PlatformParams, PredictorParams, Seconds, WindowLaw};
use crate::rng::{self, Stream};

/// Law of the false-prediction inter-arrival times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FalseShape {
    /// Same shape as the fault law.
    #[default]
    SameAsFaults,
    UniformRenewal,
}

impl FromStr for FalseShape {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "same" => Ok(FalseShape::SameAsFaults),
            "uniform" => Ok(FalseShape::UniformRenewal),
            _ => Err(ParseError::Law(s.to_string())),
        }
    }
}

impl fmt::Display for FalseShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FalseShape::SameAsFaults => "same",
            FalseShape::UniformRenewal => "uniform",
        })
    }
}

/// Everything needed to regenerate a trace from its seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    /// Fault inter-arrival law; its mean is the platform MTBF.
    pub fault_law: FailureLaw,
    pub recall: f64,
    pub precision: f64,
    pub window: Seconds,
    pub window_law: WindowLaw,
    /// Gap between an announcement and its window start.
    pub lead: Seconds,
    pub false_shape: FalseShape,
}

impl TraceConfig {
    /// Faults of shape `kind` scaled to the platform MTBF, lead time `C`.
    pub fn new(kind: LawKind, platform: &PlatformParams, pred: &PredictorParams) -> Self {
        TraceConfig {
            fault_law: FailureLaw::new(kind, platform.mtbf()),
            recall: pred.recall(),
            precision: pred.precision(),
            window: pred.window(),
            window_law: pred.window_law(),
            lead: platform.ckpt(),
            false_shape: FalseShape::SameAsFaults,
        }
    }

    pub fn with_false_shape(mut self, shape: FalseShape) -> Self {
        self.false_shape = shape;
        self
    }

    /// Same faults and predictions with every window collapsed to its fault
    /// date.
    pub fn exact_dates(mut self) -> Self {
        self.window = Seconds::ZERO;
        self
    }

    /// Law of false predictions, `None` when there are none (`r = 0` or
    /// `p = 1`).
    pub fn false_law(&self) -> Option<FailureLaw> {
        if self.recall == 0.0 || self.precision >= 1.0 {
            return None;
        }
        let mu = self.fault_law.mean.get();
        let mean = Seconds(self.precision * mu / (self.recall * (1.0 - self.precision)));
        let kind = match self.false_shape {
            FalseShape::SameAsFaults => self.fault_law.kind,
            FalseShape::UniformRenewal => LawKind::UniformRenewal,
        };
        Some(FailureLaw::new(kind, mean))
    }

    /// Offset of a predicted fault from its window start.
    pub(crate) fn window_offset<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let i = self.window.get();
        if i == 0.0 {
            return 0.0;
        }
        match self.window_law {
            WindowLaw::UniformInWindow => i * u,
            WindowLaw::AtWindowStart => 0.0,
            // u^a has mean 1 / (a + 1), so I u^(I/E - 1) has mean E.
            WindowLaw::MeanOffset(e) => i * u.powf(i / e.get() - 1.0),
        }
    }

    /// Builds the prediction event of a fault at `fault_time`.
    pub(crate) fn true_prediction(&self, fault_time: f64, offset: f64) -> TraceEvent {
        let i = self.window.get();
        let mut window_start = fault_time - offset;
        // Keep the fault inside the window despite rounding.
        while window_start + i < fault_time {
            window_start = window_start.next_up();
        }
        TraceEvent {
            time: window_start - self.lead.get(),
            kind: EventKind::TruePrediction {
                fault_time,
                window_start,
            },
        }
    }

    pub(crate) fn false_prediction(&self, window_start: f64) -> TraceEvent {
        TraceEvent {
            time: window_start - self.lead.get(),
            kind: EventKind::FalsePrediction { window_start },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EventKind {
    UnpredictedFault,
    TruePrediction { fault_time: f64, window_start: f64 },
    FalsePrediction { window_start: f64 },
}

impl EventKind {
    pub(crate) fn rank(&self) -> u8 {
        match self {
            EventKind::UnpredictedFault => 0,
            EventKind::TruePrediction { .. } => 1,
            EventKind::FalsePrediction { .. } => 2,
        }
    }
}

/// One trace event. `time` is the announcement date for predictions and
/// the fault date for unpredicted faults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub time: f64,
    pub kind: EventKind,
}

impl TraceEvent {
    /// Date of the fault this event carries, if any.
    pub fn fault_time(&self) -> Option<f64> {
        match self.kind {
            EventKind::UnpredictedFault => Some(self.time),
            EventKind::TruePrediction { fault_time, .. } => Some(fault_time),
            EventKind::FalsePrediction { .. } => None,
        }
    }

    pub fn window_start(&self) -> Option<f64> {
        match self.kind {
            EventKind::UnpredictedFault => None,
            EventKind::TruePrediction { window_start, .. } | EventKind::FalsePrediction { window_start } => {
                Some(window_start)
            }
        }
    }
}

/// Merge order of events: time, kind, generation index within the kind's
/// source process.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Keyed {
    pub event: TraceEvent,
    pub index: u64,
}

impl Keyed {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.event
            .time
            .total_cmp(&other.event.time)
            .then(self.event.kind.rank().cmp(&other.event.kind.rank()))
            .then(self.index.cmp(&other.index))
    }
}

impl PartialEq for Keyed {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl Eq for Keyed {}

impl PartialOrd for Keyed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Keyed {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key_cmp(other)
    }
}

/// Arrival dates of a renewal process.
#[derive(Debug, Clone)]
pub(crate) struct Renewal<R> {
    sampler: Sampler,
    rng: R,
    t: f64,
}

impl<R: Rng> Renewal<R> {
    pub fn new(law: &FailureLaw, rng: R) -> Self {
        Renewal {
            sampler: law.sampler(),
            rng,
            t: 0.0,
        }
    }
}

impl<R: Rng> Iterator for Renewal<R> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.t += self.sampler.sample(&mut self.rng);
        Some(self.t)
    }
}

/// Fault dates, each tagged predicted with probability `recall`.
pub(crate) fn fault_process(law: &FailureLaw, recall: f64, seed: u64) -> impl Iterator<Item = (f64, bool)> {
    let mut tags = rng::stream(seed, Stream::RecallTags);
    Renewal::new(law, rng::stream(seed, Stream::Faults)).map(move |t| {
        let u: f64 = tags.random();
        (t, u < recall)
    })
}

/// Faults up to `horizon` as `(date, predicted)` pairs.
pub fn gen_fault_trace(law: &FailureLaw, horizon: Seconds, recall: f64, seed: u64) -> Vec<(f64, bool)> {
    fault_process(law, recall, seed)
        .take_while(|&(t, _)| t <= horizon.get())
        .collect()
}

/// False-prediction window starts up to `horizon`. Empty when `r = 0` or
/// `p = 1`.
pub fn gen_false_prediction_trace(config: &TraceConfig, horizon: Seconds, seed: u64) -> Vec<f64> {
    match config.false_law() {
        Some(law) => Renewal::new(&law, rng::stream(seed, Stream::FalsePredictions))
            .take_while(|&t| t <= horizon.get())
            .collect(),
        None => Vec::new(),
    }
}

/// Turns tagged faults and false-prediction dates into one ordered event
/// list. Window offsets are drawn from the `seed`'s offset stream, one per
/// predicted fault in fault order.
pub fn merge_traces(faults: &[(f64, bool)], false_preds: &[f64], config: &TraceConfig, seed: u64) -> Vec<TraceEvent> {
    let mut offsets = rng::stream(seed, Stream::WindowOffsets);
    let mut keyed: Vec<Keyed> = faults
        .iter()
        .enumerate()
        .map(|(i, &(t, predicted))| {
            let event = if predicted {
                let off = config.window_offset(&mut offsets);
                config.true_prediction(t, off)
            } else {
                TraceEvent {
                    time: t,
                    kind: EventKind::UnpredictedFault,
                }
            };
            Keyed { event, index: i as u64 }
        })
        .chain(false_preds.iter().enumerate().map(|(j, &s)| Keyed {
            event: config.false_prediction(s),
            index: j as u64,
        }))
        .collect();
    keyed.sort();
    keyed.into_iter().map(|k| k.event).collect()
}

/// A finite, seeded trace. It can be continued past its horizon because the
/// configuration and seed regenerate the same event sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTrace {
    pub config: TraceConfig,
    pub seed: u64,
    pub horizon: Seconds,
    pub events: Vec<TraceEvent>,
}

impl EventTrace {
    /// All events announced no later than `horizon`.
    pub fn generate(config: TraceConfig, horizon: Seconds, seed: u64) -> Self {
        let events = TraceStream::new(config, seed)
            .take_while(|e| e.time <= horizon.get())
            .collect();
        EventTrace {
            config,
            seed,
            horizon,
            events,
        }
    }

    /// The recorded events followed by their regenerated continuation.
    pub fn extended(&self) -> impl Iterator<Item = TraceEvent> + '_ {
        let n = self.events.len();
        self.events
            .iter()
            .copied()
            .chain(TraceStream::new(self.config, self.seed).skip(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(kind: LawKind, r: f64, p: f64, window: f64) -> TraceConfig {
        TraceConfig {
            fault_law: FailureLaw::new(kind, Seconds(7_500.0)),
            recall: r,
            precision: p,
            window: Seconds(window),
            window_law: WindowLaw::UniformInWindow,
            lead: Seconds(600.0),
            false_shape: FalseShape::SameAsFaults,
        }
    }

    #[test]
    fn false_prediction_mean() {
        let mut cfg = config(LawKind::Exponential, 0.7, 0.4, 300.0);
        cfg.fault_law.mean = Seconds::from_minutes(125.0);
        let law = cfg.false_law().unwrap();
        assert!((law.mean.minutes() - 119.047_619).abs() < 1e-5);
        assert_eq!(law.kind, LawKind::Exponential);
        let cfg = cfg.with_false_shape(FalseShape::UniformRenewal);
        assert_eq!(cfg.false_law().unwrap().kind, LawKind::UniformRenewal);
        assert!(config(LawKind::Exponential, 0.7, 1.0, 0.0).false_law().is_none());
        assert!(config(LawKind::Exponential, 0.0, 0.5, 0.0).false_law().is_none());
    }

    #[test]
    fn recall_extremes() {
        let law = FailureLaw::new(LawKind::Exponential, Seconds(100.0));
        let h = Seconds(100_000.0);
        assert!(gen_fault_trace(&law, h, 0.0, 1).iter().all(|&(_, p)| !p));
        assert!(gen_fault_trace(&law, h, 1.0, 1).iter().all(|&(_, p)| p));
    }

    #[test]
    fn exact_mode_windows_sit_on_faults() {
        let cfg = config(LawKind::Weibull { shape: 0.7 }, 0.85, 0.82, 0.0);
        let trace = EventTrace::generate(cfg, Seconds(1e7), 3);
        for e in &trace.events {
            if let EventKind::TruePrediction {
                fault_time,
                window_start,
            } = e.kind
            {
                assert_eq!(fault_time, window_start);
                assert_eq!(e.time, fault_time - 600.0);
            }
        }
    }

    #[test]
    fn perfect_predictor_yields_true_predictions_only() {
        let cfg = config(LawKind::Exponential, 1.0, 1.0, 300.0);
        let trace = EventTrace::generate(cfg, Seconds(1e7), 5);
        assert!(!trace.events.is_empty());
        assert!(trace
            .events
            .iter()
            .all(|e| matches!(e.kind, EventKind::TruePrediction { .. })));
    }

    #[test]
    fn windows_contain_their_faults() {
        let cfg = config(LawKind::Weibull { shape: 0.5 }, 0.85, 0.82, 3_000.0);
        let trace = EventTrace::generate(cfg, Seconds(1e8), 11);
        for e in &trace.events {
            if let EventKind::TruePrediction {
                fault_time,
                window_start,
            } = e.kind
            {
                assert!(window_start <= fault_time && fault_time <= window_start + 3_000.0);
            }
        }
    }

    #[test]
    fn window_offset_laws() {
        let mut rng = rng::stream(1, Stream::WindowOffsets);
        let mut cfg = config(LawKind::Exponential, 0.5, 0.5, 1_000.0);
        cfg.window_law = WindowLaw::MeanOffset(Seconds(200.0));
        let n = 200_000;
        let mean = (0..n).map(|_| cfg.window_offset(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 200.0).abs() < 4.0, "{mean}");
        cfg.window_law = WindowLaw::AtWindowStart;
        assert_eq!(cfg.window_offset(&mut rng), 0.0);
        cfg.window_law = WindowLaw::MeanOffset(Seconds(1_000.0));
        assert_eq!(cfg.window_offset(&mut rng), 1_000.0);
    }

    #[test]
    fn tie_breaking_by_kind_then_index() {
        let cfg = config(LawKind::Exponential, 0.5, 0.5, 0.0);
        // A fault at 1600 predicted exactly is announced at 1000, like a
        // false prediction for window 1600 and an unpredicted fault at 1000.
        let faults = [(1_000.0, false), (1_600.0, true)];
        let merged = merge_traces(&faults, &[1_600.0, 1_600.0], &cfg, 0);
        let ranks: Vec<u8> = merged.iter().map(|e| e.kind.rank()).collect();
        assert_eq!(ranks, vec![0, 1, 2, 2]);
        assert!(merged.iter().all(|e| e.time == 1_000.0));
    }

    #[test]
    fn extension_continues_the_stream() {
        let cfg = config(LawKind::Weibull { shape: 0.7 }, 0.7, 0.4, 3_000.0);
        let short = EventTrace::generate(cfg, Seconds(1e6), 9);
        let long = EventTrace::generate(cfg, Seconds(1e7), 9);
        let extended: Vec<TraceEvent> = short.extended().take(long.events.len()).collect();
        assert_eq!(extended, long.events);
        assert_eq!(long.events[..short.events.len()], short.events[..]);
    }
}
