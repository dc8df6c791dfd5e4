//! Line-oriented trace files.
//!
//! ```text
//! # predckpt-trace 1
//! # rng chacha8-v1
//! # seed 42
//! # fault_law weibull:0.7
//! # mtbf_s 7518.796992481203
//! # recall 0.85
//! # precision 0.82
//! # window_s 300
//! # window_law uniform
//! # lead_s 600
//! # false_law same
//! # horizon_s 10000000
//! 5123.25 unpredicted
//! 9001.5 true 9140.125
//! 12000.75 false
//! ```
//!
//! The first column is the fault date for unpredicted faults and the window
//! start for predictions; a true prediction also carries its fault date.
//! Announcement dates are `window start - lead`. Numbers use the shortest
//! representation that round-trips exactly.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::{EventKind, EventTrace, FailureLaw, TraceConfig, TraceEvent};
use crate::error::TraceError;
use crate::platform::Seconds;
use crate::rng::RNG_NAME;

const MAGIC: &str = "predckpt-trace 1";

pub fn write_trace<W: Write>(trace: &EventTrace, mut out: W) -> std::io::Result<()> {
    let c = &trace.config;
    writeln!(out, "# {MAGIC}")?;
    writeln!(out, "# rng {RNG_NAME}")?;
    writeln!(out, "# seed {}", trace.seed)?;
    writeln!(out, "# fault_law {}", c.fault_law.kind)?;
    writeln!(out, "# mtbf_s {}", c.fault_law.mean.get())?;
    writeln!(out, "# recall {}", c.recall)?;
    writeln!(out, "# precision {}", c.precision)?;
    writeln!(out, "# window_s {}", c.window.get())?;
    writeln!(out, "# window_law {}", c.window_law)?;
    writeln!(out, "# lead_s {}", c.lead.get())?;
    writeln!(out, "# false_law {}", c.false_shape)?;
    writeln!(out, "# horizon_s {}", trace.horizon.get())?;
    for e in &trace.events {
        match e.kind {
            EventKind::UnpredictedFault => writeln!(out, "{} unpredicted", e.time)?,
            EventKind::TruePrediction {
                fault_time,
                window_start,
            } => writeln!(out, "{window_start} true {fault_time}")?,
            EventKind::FalsePrediction { window_start } => writeln!(out, "{window_start} false")?,
        }
    }
    Ok(())
}

fn format_err(line: usize, msg: impl Into<String>) -> TraceError {
    TraceError::Format { line, msg: msg.into() }
}

pub fn read_trace<R: BufRead>(input: R) -> Result<EventTrace, TraceError> {
    let mut header: HashMap<String, (usize, String)> = HashMap::new();
    let mut body: Vec<(usize, String)> = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let n = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            let rest = rest.trim();
            if n == 1 {
                if rest != MAGIC {
                    return Err(format_err(n, format!("expected `# {MAGIC}`")));
                }
                continue;
            }
            let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
            header.insert(k.to_string(), (n, v.trim().to_string()));
        } else {
            body.push((n, trimmed.to_string()));
        }
    }

    fn field<T: std::str::FromStr>(h: &HashMap<String, (usize, String)>, key: &str) -> Result<T, TraceError> {
        let (n, v) = h
            .get(key)
            .ok_or_else(|| format_err(0, format!("missing header `{key}`")))?;
        v.parse()
            .map_err(|_| format_err(*n, format!("bad `{key}` value `{v}`")))
    }

    let rng: String = field(&header, "rng")?;
    if rng != RNG_NAME {
        return Err(format_err(header["rng"].0, format!("unsupported generator `{rng}`")));
    }
    let config = TraceConfig {
        fault_law: FailureLaw::new(field(&header, "fault_law")?, Seconds(field(&header, "mtbf_s")?)),
        recall: field(&header, "recall")?,
        precision: field(&header, "precision")?,
        window: Seconds(field(&header, "window_s")?),
        window_law: field(&header, "window_law")?,
        lead: Seconds(field(&header, "lead_s")?),
        false_shape: field(&header, "false_law")?,
    };
    let seed: u64 = field(&header, "seed")?;
    let horizon = Seconds(field(&header, "horizon_s")?);

    let mut events = Vec::with_capacity(body.len());
    for (n, line) in body {
        let cols: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| -> Result<f64, TraceError> {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format_err(n, format!("bad number `{s}`")))
        };
        let event = match cols.as_slice() {
            [t, "unpredicted"] => TraceEvent {
                time: num(t)?,
                kind: EventKind::UnpredictedFault,
            },
            [s, "true", f] => {
                let (window_start, fault_time) = (num(s)?, num(f)?);
                if !(window_start <= fault_time && fault_time <= window_start + config.window.get()) {
                    return Err(format_err(n, "fault outside its prediction window"));
                }
                TraceEvent {
                    time: window_start - config.lead.get(),
                    kind: EventKind::TruePrediction {
                        fault_time,
                        window_start,
                    },
                }
            }
            [s, "false"] => config.false_prediction(num(s)?),
            _ => return Err(format_err(n, format!("unrecognized event `{line}`"))),
        };
        if events.last().is_some_and(|prev: &TraceEvent| prev.time > event.time) {
            return Err(format_err(n, "events out of order"));
        }
        events.push(event);
    }
    Ok(EventTrace {
        config,
        seed,
        horizon,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::platform::WindowLaw;
    use crate::trace::{FalseShape, LawKind};

    fn sample_trace(window_law: WindowLaw) -> EventTrace {
        let cfg = TraceConfig {
            fault_law: FailureLaw::new(LawKind::Weibull { shape: 0.7 }, Seconds(7_518.796_992_481_203)),
            recall: 0.85,
            precision: 0.82,
            window: Seconds(300.0),
            window_law,
            lead: Seconds(600.0),
            false_shape: FalseShape::UniformRenewal,
        };
        EventTrace::generate(cfg, Seconds(5e6), 42)
    }

    #[test]
    fn round_trip_is_exact() {
        for law in [WindowLaw::UniformInWindow, WindowLaw::MeanOffset(Seconds(100.0))] {
            let trace = sample_trace(law);
            let mut buf = Vec::new();
            write_trace(&trace, &mut buf).unwrap();
            let back = read_trace(buf.as_slice()).unwrap();
            assert_eq!(back, trace);
        }
    }

    #[test]
    fn rejects_bad_files() {
        let trace = sample_trace(WindowLaw::UniformInWindow);
        let mut buf = Vec::new();
        write_trace(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();

        let no_magic = text.replacen(MAGIC, "something else", 1);
        assert!(read_trace(no_magic.as_bytes()).is_err());

        let garbage = format!("{text}12.5 maybe\n");
        match read_trace(garbage.as_bytes()) {
            Err(TraceError::Format { line, .. }) => assert_eq!(line, text.lines().count() + 1),
            other => panic!("{other:?}"),
        }

        let missing_seed: String = text
            .lines()
            .filter(|l| !l.starts_with("# seed"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(read_trace(missing_seed.as_bytes()).is_err());

        let outside = format!("{text}1e12 true 2e12\n");
        assert!(read_trace(outside.as_bytes()).is_err());
    }
}
