//! Platform and predictor parameters, and the event-rate algebra linking the
//! platform MTBF to the predicted / unpredicted event streams.

mod units;

pub use units::{ExtSeconds, Seconds, DAY, HOUR, MINUTE, YEAR};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ParamError, ParseError};

/// Physical platform and checkpoint cost model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlatformParams {
    n_procs: u64,
    mtbf_ind: Seconds,
    ckpt: Seconds,
    down: Seconds,
    recovery: Seconds,
    migration: Option<Seconds>,
}

fn positive(name: &'static str, v: Seconds) -> Result<(), ParamError> {
    if v.get() > 0.0 && v.get().is_finite() {
        Ok(())
    } else {
        Err(ParamError::NotPositive { name, value: v.get() })
    }
}

impl PlatformParams {
    pub fn new(
        n_procs: u64,
        mtbf_ind: Seconds,
        ckpt: Seconds,
        down: Seconds,
        recovery: Seconds,
    ) -> Result<Self, ParamError> {
        if n_procs == 0 {
            return Err(ParamError::NoProcessors);
        }
        positive("individual MTBF", mtbf_ind)?;
        positive("checkpoint length", ckpt)?;
        positive("downtime", down)?;
        positive("recovery length", recovery)?;
        let p = PlatformParams {
            n_procs,
            mtbf_ind,
            ckpt,
            down,
            recovery,
            migration: None,
        };
        if ckpt.get() > p.mtbf().get() {
            return Err(ParamError::CheckpointExceedsMtbf {
                ckpt: ckpt.get(),
                mtbf: p.mtbf().get(),
            });
        }
        Ok(p)
    }

    /// C = R = 10 mn, D = 1 mn, 125-year individual MTBF.
    pub fn reference(n_procs: u64) -> Result<Self, ParamError> {
        Self::new(
            n_procs,
            Seconds::from_years(125.0),
            Seconds::from_minutes(10.0),
            Seconds::from_minutes(1.0),
            Seconds::from_minutes(10.0),
        )
    }

    pub fn with_migration(mut self, m: Seconds) -> Result<Self, ParamError> {
        positive("migration cost", m)?;
        self.migration = Some(m);
        Ok(self)
    }

    /// Same platform with a different processor count.
    pub fn with_procs(&self, n_procs: u64) -> Result<Self, ParamError> {
        let mut p = Self::new(n_procs, self.mtbf_ind, self.ckpt, self.down, self.recovery)?;
        p.migration = self.migration;
        Ok(p)
    }

    /// Same platform with downtime and recovery replaced.
    pub fn with_down_recovery(&self, down: Seconds, recovery: Seconds) -> Result<Self, ParamError> {
        let mut p = Self::new(self.n_procs, self.mtbf_ind, self.ckpt, down, recovery)?;
        p.migration = self.migration;
        Ok(p)
    }

    /// Multiplies every duration by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, ParamError> {
        let mut p = Self::new(
            self.n_procs,
            self.mtbf_ind.scaled(factor),
            self.ckpt.scaled(factor),
            self.down.scaled(factor),
            self.recovery.scaled(factor),
        )?;
        if let Some(m) = self.migration {
            p = p.with_migration(m.scaled(factor))?;
        }
        Ok(p)
    }

    pub fn n_procs(&self) -> u64 {
        self.n_procs
    }
    pub fn mtbf_ind(&self) -> Seconds {
        self.mtbf_ind
    }
    pub fn ckpt(&self) -> Seconds {
        self.ckpt
    }
    pub fn down(&self) -> Seconds {
        self.down
    }
    pub fn recovery(&self) -> Seconds {
        self.recovery
    }
    pub fn migration(&self) -> Option<Seconds> {
        self.migration
    }

    pub fn mtbf(&self) -> Seconds {
        platform_mtbf(self)
    }
}

/// Platform MTBF, `mu_ind / N`.
pub fn platform_mtbf(params: &PlatformParams) -> Seconds {
    Seconds(params.mtbf_ind.get() / params.n_procs as f64)
}

/// Where a predicted fault falls inside its prediction window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum WindowLaw {
    /// Uniform over `[t0, t0 + I]`.
    #[default]
    UniformInWindow,
    /// Always at the window start.
    AtWindowStart,
    /// Custom law with the given mean offset from the window start.
    MeanOffset(Seconds),
}

impl FromStr for WindowLaw {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "uniform" => Ok(WindowLaw::UniformInWindow),
            "start" => Ok(WindowLaw::AtWindowStart),
            other => other
                .strip_prefix("mean:")
                .and_then(|d| d.parse().ok())
                .map(WindowLaw::MeanOffset)
                .ok_or_else(|| ParseError::WindowLaw(s.to_string())),
        }
    }
}

impl fmt::Display for WindowLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowLaw::UniformInWindow => f.write_str("uniform"),
            WindowLaw::AtWindowStart => f.write_str("start"),
            WindowLaw::MeanOffset(m) => write!(f, "mean:{m}"),
        }
    }
}

/// Fault predictor characteristics plus the trust probability `q` the
/// checkpointing policy applies to its announcements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictorParams {
    recall: f64,
    precision: f64,
    window: Seconds,
    trust: f64,
    window_law: WindowLaw,
}

fn in_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<(), ParamError> {
    if value >= lo && value <= hi {
        Ok(())
    } else {
        Err(ParamError::OutOfRange { name, value, lo, hi })
    }
}

impl PredictorParams {
    pub fn new(
        recall: f64,
        precision: f64,
        window: Seconds,
        trust: f64,
        window_law: WindowLaw,
    ) -> Result<Self, ParamError> {
        in_range("recall", recall, 0.0, 1.0)?;
        if !(precision > 0.0 && precision <= 1.0) {
            return Err(ParamError::OutOfRange {
                name: "precision",
                value: precision,
                lo: 0.0,
                hi: 1.0,
            });
        }
        in_range("trust", trust, 0.0, 1.0)?;
        if !(window.get() >= 0.0 && window.get().is_finite()) {
            return Err(ParamError::NotPositive {
                name: "window",
                value: window.get(),
            });
        }
        if let WindowLaw::MeanOffset(m) = window_law {
            in_range("mean fault offset", m.get(), 0.0, window.get())?;
        }
        Ok(PredictorParams {
            recall,
            precision,
            window,
            trust,
            window_law,
        })
    }

    /// Exact-date predictor (`I = 0`) that is always trusted.
    pub fn exact(recall: f64, precision: f64) -> Result<Self, ParamError> {
        Self::new(recall, precision, Seconds::ZERO, 1.0, WindowLaw::UniformInWindow)
    }

    /// No predictor at all.
    pub fn none() -> Self {
        PredictorParams {
            recall: 0.0,
            precision: 1.0,
            window: Seconds::ZERO,
            trust: 0.0,
            window_law: WindowLaw::UniformInWindow,
        }
    }

    pub fn with_trust(mut self, q: f64) -> Result<Self, ParamError> {
        in_range("trust", q, 0.0, 1.0)?;
        self.trust = q;
        Ok(self)
    }

    pub fn with_window(self, window: Seconds) -> Result<Self, ParamError> {
        let law = match self.window_law {
            WindowLaw::MeanOffset(m) if m.get() > window.get() => WindowLaw::MeanOffset(window),
            other => other,
        };
        Self::new(self.recall, self.precision, window, self.trust, law)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self, ParamError> {
        let law = match self.window_law {
            WindowLaw::MeanOffset(m) => WindowLaw::MeanOffset(m.scaled(factor)),
            other => other,
        };
        Self::new(self.recall, self.precision, self.window.scaled(factor), self.trust, law)
    }

    pub fn recall(&self) -> f64 {
        self.recall
    }
    pub fn precision(&self) -> f64 {
        self.precision
    }
    pub fn window(&self) -> Seconds {
        self.window
    }
    pub fn trust(&self) -> f64 {
        self.trust
    }
    pub fn window_law(&self) -> WindowLaw {
        self.window_law
    }

    /// Expected offset of a predicted fault from the start of its window,
    /// conditioned on the fault occurring inside it.
    pub fn mean_fault_offset(&self) -> Seconds {
        match self.window_law {
            WindowLaw::UniformInWindow => Seconds(self.window.get() / 2.0),
            WindowLaw::AtWindowStart => Seconds::ZERO,
            WindowLaw::MeanOffset(m) => m,
        }
    }
}

/// Mean inter-arrival times of the three event streams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    /// Platform MTBF.
    pub mu: Seconds,
    /// Mean time between predictions, true or false.
    pub mu_p: ExtSeconds,
    /// Mean time between unpredicted faults.
    pub mu_np: ExtSeconds,
    /// Mean time between events of any kind.
    pub mu_e: Seconds,
}

impl RateSet {
    pub fn rate_p(&self) -> f64 {
        self.mu_p.rate()
    }
    pub fn rate_np(&self) -> f64 {
        self.mu_np.rate()
    }
    pub fn rate_e(&self) -> f64 {
        1.0 / self.mu_e.get()
    }
}

/// `mu_NP = mu / (1 - r)`, `mu_P = p mu / r`, `1/mu_e = 1/mu_P + 1/mu_NP`.
pub fn derive_rates(mu: Seconds, pred: &PredictorParams) -> RateSet {
    let m = mu.get();
    let rate_np = (1.0 - pred.recall) / m;
    let rate_p = pred.recall / (pred.precision * m);
    RateSet {
        mu,
        mu_p: ExtSeconds::from_rate(rate_p),
        mu_np: ExtSeconds::from_rate(rate_np),
        mu_e: Seconds(1.0 / (rate_p + rate_np)),
    }
}

/// Probability that a Poisson stream with mean inter-arrival `mean` yields two
/// or more events during `period`: `1 - (1 + b) e^-b` with `b = period / mean`.
pub fn multi_event_prob(period: Seconds, mean: Seconds) -> f64 {
    let b = period.get() / mean.get();
    // expm1 keeps precision for small b, where the two terms nearly cancel.
    -(b * (-b).exp()) - (-b).exp_m1()
}
