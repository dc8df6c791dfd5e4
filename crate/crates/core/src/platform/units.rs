//! Time quantities.
//!
//! Every duration is stored in seconds as an `f64`. Text forms accept a unit
//! suffix: `s`, `mn` (also `min`), `h`, `d` and `y`, where a year is exactly
//! 365 days.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

pub const MINUTE: f64 = 60.0;
pub const HOUR: f64 = 3_600.0;
pub const DAY: f64 = 86_400.0;
pub const YEAR: f64 = 365.0 * DAY;

/// A finite, non-negative span of time in seconds.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seconds(pub f64);

impl Seconds {
    pub const ZERO: Seconds = Seconds(0.0);

    pub fn from_minutes(mn: f64) -> Self {
        Seconds(mn * MINUTE)
    }

    pub fn from_hours(h: f64) -> Self {
        Seconds(h * HOUR)
    }

    pub fn from_days(d: f64) -> Self {
        Seconds(d * DAY)
    }

    pub fn from_years(y: f64) -> Self {
        Seconds(y * YEAR)
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    pub fn minutes(self) -> f64 {
        self.0 / MINUTE
    }

    pub fn days(self) -> f64 {
        self.0 / DAY
    }

    pub fn scaled(self, factor: f64) -> Self {
        Seconds(self.0 * factor)
    }
}

impl fmt::Display for Seconds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}s", self.0)
    }
}

impl FromStr for Seconds {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let split = s.find(|c: char| c.is_ascii_alphabetic()).unwrap_or(s.len());
        let (num, unit) = s.split_at(split);
        let value: f64 = num.trim().parse().map_err(|_| ParseError::Duration(s.to_string()))?;
        let scale = match unit.trim() {
            "" | "s" => 1.0,
            "mn" | "min" => MINUTE,
            "h" => HOUR,
            "d" => DAY,
            "y" => YEAR,
            _ => return Err(ParseError::Duration(s.to_string())),
        };
        if !value.is_finite() || value < 0.0 {
            return Err(ParseError::Duration(s.to_string()));
        }
        Ok(Seconds(value * scale))
    }
}

/// A mean time that may be infinite, used for event rates that can vanish
/// (no unpredicted faults when recall is 1, no predictions when recall is 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtSeconds {
    Finite(Seconds),
    Infinite,
}

impl ExtSeconds {
    pub fn is_infinite(self) -> bool {
        matches!(self, ExtSeconds::Infinite)
    }

    pub fn finite(self) -> Option<Seconds> {
        match self {
            ExtSeconds::Finite(s) => Some(s),
            ExtSeconds::Infinite => None,
        }
    }

    /// Reciprocal, i.e. the event rate per second. Infinite means zero rate.
    pub fn rate(self) -> f64 {
        match self {
            ExtSeconds::Finite(s) => 1.0 / s.0,
            ExtSeconds::Infinite => 0.0,
        }
    }

    /// Builds a mean time from a rate; a zero rate maps to `Infinite`.
    pub fn from_rate(rate: f64) -> Self {
        if rate == 0.0 {
            ExtSeconds::Infinite
        } else {
            ExtSeconds::Finite(Seconds(1.0 / rate))
        }
    }

    /// Value in seconds, `f64::INFINITY` for the infinite variant.
    pub fn as_f64(self) -> f64 {
        match self {
            ExtSeconds::Finite(s) => s.0,
            ExtSeconds::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for ExtSeconds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtSeconds::Finite(s) => s.fmt(f),
            ExtSeconds::Infinite => f.write_str("inf"),
        }
    }
}
