//! Periodic checkpointing under fault prediction.
//!
//! * [`platform`]: platform and predictor parameters, MTBF rate algebra.
//! * [`waste`]: closed-form waste of each strategy and period optimizers.
//! * [`trace`]: reproducible fault and prediction traces.
//! * [`strategy`]: executable strategies and their reaction to predictions.
//! * [`sim`]: discrete-event simulator and replicate driver.
//! * [`experiment`]: sweep plans, result rows and CSV output.

pub mod error;
pub mod experiment;
pub mod platform;
pub mod rng;
pub mod sim;
pub mod strategy;
pub mod trace;
pub mod waste;

pub use error::{ExperimentError, ModelError, ParamError, ParseError, SimError, TraceError};
pub use experiment::{ExperimentPlan, ResultRow};
pub use platform::{
    derive_rates, multi_event_prob, platform_mtbf, ExtSeconds, PlatformParams, PredictorParams, RateSet, Seconds,
    WindowLaw,
};
pub use sim::{JobSpec, ReplicateSummary, Scenario, SimOutcome};
pub use strategy::{Strategy, StrategySpec};
pub use trace::{EventKind, EventTrace, FailureLaw, FalseShape, LawKind, TraceConfig, TraceEvent, TraceStream};
pub use waste::{OptimizedPlan, WasteQuery};
