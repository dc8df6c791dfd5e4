use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ParseError;
use crate::platform::Seconds;
use crate::rng::open_unit;

/// Shape of an inter-arrival distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LawKind {
    Exponential,
    Weibull {
        shape: f64,
    },
    /// Uniform on `[0, 2 mean]`.
    UniformRenewal,
}

impl FromStr for LawKind {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseError::Law(s.to_string());
        match s.trim() {
            "exp" | "exponential" => Ok(LawKind::Exponential),
            "uniform" => Ok(LawKind::UniformRenewal),
            other => {
                let k: f64 = other
                    .strip_prefix("weibull:")
                    .ok_or_else(bad)?
                    .parse()
                    .map_err(|_| bad())?;
                if k > 0.0 && k.is_finite() {
                    Ok(LawKind::Weibull { shape: k })
                } else {
                    Err(bad())
                }
            }
        }
    }
}

impl fmt::Display for LawKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LawKind::Exponential => f.write_str("exp"),
            LawKind::Weibull { shape } => write!(f, "weibull:{shape}"),
            LawKind::UniformRenewal => f.write_str("uniform"),
        }
    }
}

/// Inter-arrival law with a given mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureLaw {
    pub kind: LawKind,
    pub mean: Seconds,
}

impl FailureLaw {
    pub fn new(kind: LawKind, mean: Seconds) -> Self {
        FailureLaw { kind, mean }
    }

    /// Weibull scale `lambda` with `lambda * Gamma(1 + 1/k) = mean`.
    pub fn weibull_scale(&self) -> Option<f64> {
        match self.kind {
            LawKind::Weibull { shape } => Some(self.mean.get() / gamma(1.0 + 1.0 / shape)),
            _ => None,
        }
    }

    /// Inverse-transform sample of one inter-arrival time.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }

    pub fn sampler(&self) -> Sampler {
        let mean = self.mean.get();
        match self.kind {
            LawKind::Exponential => Sampler::Exponential { mean },
            LawKind::Weibull { shape } => Sampler::Weibull {
                scale: mean / gamma(1.0 + 1.0 / shape),
                inv_shape: 1.0 / shape,
            },
            LawKind::UniformRenewal => Sampler::Uniform { width: 2.0 * mean },
        }
    }
}

/// A [`FailureLaw`] with its constants precomputed.
#[derive(Debug, Clone, Copy)]
pub enum Sampler {
    Exponential { mean: f64 },
    Weibull { scale: f64, inv_shape: f64 },
    Uniform { width: f64 },
}

impl Sampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = open_unit(rng);
        match *self {
            Sampler::Exponential { mean } => -mean * u.ln(),
            Sampler::Weibull { scale, inv_shape } => scale * (-u.ln()).powf(inv_shape),
            Sampler::Uniform { width } => width * u,
        }
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function by the Lanczos approximation (g = 7, n = 9).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection formula.
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let t = x + LANCZOS_G + 0.5;
        let sum = LANCZOS[1..]
            .iter()
            .enumerate()
            .fold(LANCZOS[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    #[test]
    fn gamma_known_values() {
        assert!((gamma(1.0) - 1.0).abs() < 1e-13);
        assert!((gamma(3.0) - 2.0).abs() < 1e-13);
        assert!((gamma(5.0) - 24.0).abs() < 1e-11);
        assert!((gamma(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!((gamma(1.5) - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
        assert!((gamma(1.0 + 1.0 / 0.7) - 1.265_823_506_057_283).abs() < 1e-9);
    }

    #[test]
    fn weibull_scales() {
        let law = FailureLaw::new(LawKind::Weibull { shape: 0.5 }, Seconds(100.0));
        assert!((law.weibull_scale().unwrap() - 50.0).abs() < 1e-11);
        let law = FailureLaw::new(LawKind::Weibull { shape: 0.7 }, Seconds(100.0));
        assert!((law.weibull_scale().unwrap() - 100.0 / 1.265_823_506_057_283).abs() < 1e-7);
        assert_eq!(
            FailureLaw::new(LawKind::Exponential, Seconds(1.0)).weibull_scale(),
            None
        );
    }

    #[test]
    fn parses_laws() {
        assert_eq!("exp".parse::<LawKind>().unwrap(), LawKind::Exponential);
        assert_eq!(
            "weibull:0.7".parse::<LawKind>().unwrap(),
            LawKind::Weibull { shape: 0.7 }
        );
        assert_eq!("uniform".parse::<LawKind>().unwrap(), LawKind::UniformRenewal);
        assert!("weibull:-1".parse::<LawKind>().is_err());
        assert!("gamma".parse::<LawKind>().is_err());
        for k in [
            LawKind::Exponential,
            LawKind::Weibull { shape: 0.5 },
            LawKind::UniformRenewal,
        ] {
            assert_eq!(k.to_string().parse::<LawKind>().unwrap(), k);
        }
    }

    #[test]
    fn samples_are_nonnegative() {
        let mut rng = stream(1, Stream::Faults);
        for kind in [
            LawKind::Exponential,
            LawKind::Weibull { shape: 0.5 },
            LawKind::UniformRenewal,
        ] {
            let law = FailureLaw::new(kind, Seconds(10.0));
            assert!((0..1_000).all(|_| law.sample(&mut rng) >= 0.0));
        }
    }
}
