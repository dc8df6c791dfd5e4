use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("invalid duration `{0}` (expected a number with optional s/mn/h/d/y suffix)")]
    Duration(String),
    #[error("invalid failure law `{0}` (expected exp, uniform or weibull:<shape>)")]
    Law(String),
    #[error("invalid strategy `{0}`")]
    Strategy(String),
    #[error("invalid window law `{0}` (expected uniform, start or mean:<duration>)")]
    WindowLaw(String),
}

/// Rejected parameter sets.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("{name} must be strictly positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("processor count must be at least 1")]
    NoProcessors,
    #[error("checkpoint length {ckpt}s exceeds the platform MTBF {mtbf}s")]
    CheckpointExceedsMtbf { ckpt: f64, mtbf: f64 },
}

/// Errors raised by the closed-form waste model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("period {period}s is shorter than the checkpoint length {ckpt}s")]
    PeriodBelowCheckpoint { period: f64, ckpt: f64 },
    #[error("period {period}s (plus window {window}s) exceeds the validity cap {cap}s")]
    PeriodAboveCap { period: f64, window: f64, cap: f64 },
    #[error("migration waste requested but no migration cost is configured")]
    MissingMigrationCost,
    #[error("proactive period required for this strategy")]
    MissingProactivePeriod,
    #[error("proactive period {period}s must satisfy C <= T_P and divide the window {window}s")]
    BadProactivePeriod { period: f64, window: f64 },
    #[error("prediction window {window}s is shorter than the checkpoint length {ckpt}s")]
    WindowBelowCheckpoint { window: f64, ckpt: f64 },
    #[error("trust probability {0} outside [0, 1]")]
    BadTrust(f64),
    #[error("strategy {0} has an analytical model only and cannot be simulated")]
    NotSimulated(&'static str),
    #[error("no finite regular period (checkpoint-free plan)")]
    InfinitePeriod,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid strategy: {0}")]
    Strategy(#[from] ModelError),
    #[error("job did not terminate: makespan {makespan}s exceeds {limit}s (base work {base_work}s)")]
    NonTermination { makespan: f64, limit: f64, base_work: f64 },
    #[error("base work must be strictly positive, got {0}")]
    BadBaseWork(f64),
    #[error("replicate count must be at least 1")]
    NoReplicates,
    #[error("empty period grid")]
    EmptyGrid,
    #[error("event log write failed: {0}")]
    Log(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("trace line {line}: {msg}")]
    Format { line: usize, msg: String },
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("simulation at {coords}: {source}")]
    Sim {
        coords: String,
        #[source]
        source: SimError,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("empty sweep axis `{0}`")]
    EmptyAxis(&'static str),
    #[error("csv header: {0}")]
    Header(String),
}
