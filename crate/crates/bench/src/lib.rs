//! Shared fixtures for the criterion benches.

use predckpt::{PlatformParams, PredictorParams, Seconds, WindowLaw};

/// Reference platform at `n` processors.
pub fn platform(n: u64) -> PlatformParams {
    PlatformParams::reference(n).expect("reference platform")
}

/// The accurate predictor (p = 0.82, r = 0.85) with a window of `window_s` seconds.
pub fn accurate_predictor(window_s: f64) -> PredictorParams {
    PredictorParams::new(0.85, 0.82, Seconds(window_s), 1.0, WindowLaw::UniformInWindow).expect("valid predictor")
}
