use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::io::Write;
use std::iter::Peekable;

use super::{Counters, JobSpec, SimOutcome};
use crate::error::SimError;
use crate::platform::{PlatformParams, PredictorParams};
use crate::strategy::{PolicyState, PredictionAction, ProactivePlan, Situation, StrategySpec};
use crate::trace::{EventKind, TraceEvent};

/// Appends `<t> <event> <detail>` to the event log, if any.
macro_rules! note {
    ($eng:expr, $event:expr, $($arg:tt)*) => {
        match $eng.log.as_mut() {
            Some(log) => writeln!(log, "{} {} {}", $eng.now, $event, format_args!($($arg)*)).map_err(SimError::from),
            None => Ok(()),
        }
    };
}

/// Makespans beyond this multiple of the base work abort the run.
pub const NON_TERMINATION_FACTOR: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CkptKind {
    Regular,
    /// Taken just before a trusted prediction window.
    Extra,
    Proactive,
    Final,
}

impl CkptKind {
    fn name(self) -> &'static str {
        match self {
            CkptKind::Regular => "regular",
            CkptKind::Extra => "extra",
            CkptKind::Proactive => "proactive",
            CkptKind::Final => "final",
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Phase {
    Work {
        end: f64,
        proactive: bool,
        finishes_job: bool,
    },
    Checkpoint {
        kind: CkptKind,
        end: f64,
    },
    /// Waiting for a trusted window to open.
    Idle {
        end: f64,
    },
    Down {
        end: f64,
    },
    Recover {
        end: f64,
    },
    Done,
}

impl Phase {
    fn end(&self) -> f64 {
        match *self {
            Phase::Work { end, .. }
            | Phase::Checkpoint { end, .. }
            | Phase::Idle { end }
            | Phase::Down { end }
            | Phase::Recover { end } => end,
            Phase::Done => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode {
    Regular,
    NoCheckpoint { until: f64 },
    Periodic { period: f64, left: u64 },
}

/// Fault date ordered by `total_cmp` for the pending-fault heap.
#[derive(Debug, Clone, Copy, PartialEq)]
struct FaultAt(f64);

impl Eq for FaultAt {}

impl PartialOrd for FaultAt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FaultAt {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

struct Engine<'a, I: Iterator<Item = TraceEvent>> {
    ckpt: f64,
    down: f64,
    recovery: f64,
    period: f64,
    base_work: f64,
    limit: f64,
    policy: PolicyState,
    events: Peekable<I>,
    predicted: BinaryHeap<Reverse<FaultAt>>,

    now: f64,
    phase: Phase,
    mode: Mode,
    /// Window start of the trusted prediction being prepared for.
    pending: Option<f64>,
    committed: f64,
    uncommitted: f64,
    /// Work done in the current regular period (`W_reg`).
    period_work: f64,
    /// `period_work` as of the last completed checkpoint.
    saved_period_work: f64,

    lost: f64,
    ckpt_time: f64,
    down_time: f64,
    recovery_time: f64,
    idle_time: f64,
    counters: Counters,
    log: Option<&'a mut dyn Write>,
}

impl<'a, I: Iterator<Item = TraceEvent>> Engine<'a, I> {
    fn remaining_job(&self) -> f64 {
        self.base_work - self.committed - self.uncommitted
    }

    /// Moves the clock to `t`, charging the elapsed time to the running phase.
    fn advance(&mut self, t: f64) {
        let dt = t - self.now;
        match self.phase {
            Phase::Work { proactive, .. } => {
                self.uncommitted += dt;
                if !proactive {
                    self.period_work += dt;
                }
            }
            Phase::Checkpoint { .. } => self.ckpt_time += dt,
            Phase::Idle { .. } => self.idle_time += dt,
            Phase::Down { .. } => self.down_time += dt,
            Phase::Recover { .. } => self.recovery_time += dt,
            Phase::Done => {}
        }
        self.now = t;
    }

    fn start_checkpoint(&mut self, kind: CkptKind) -> Result<(), SimError> {
        self.phase = Phase::Checkpoint {
            kind,
            end: self.now + self.ckpt,
        };
        note!(self, "ckpt-start", "{}", kind.name())
    }

    fn start_regular_work(&mut self) -> Result<(), SimError> {
        let rem_job = self.remaining_job();
        if rem_job <= 0.0 {
            return if self.uncommitted > 0.0 {
                self.start_checkpoint(CkptKind::Final)
            } else {
                self.phase = Phase::Done;
                Ok(())
            };
        }
        let rem_period = self.period - self.ckpt - self.period_work;
        if rem_job <= rem_period {
            self.phase = Phase::Work {
                end: self.now + rem_job,
                proactive: false,
                finishes_job: true,
            };
            Ok(())
        } else if rem_period <= 0.0 {
            self.start_checkpoint(CkptKind::Regular)
        } else {
            self.phase = Phase::Work {
                end: self.now + rem_period,
                proactive: false,
                finishes_job: false,
            };
            Ok(())
        }
    }

    fn start_proactive_work(&mut self) -> Result<(), SimError> {
        let segment = match self.mode {
            Mode::NoCheckpoint { until } => until - self.now,
            Mode::Periodic { period, .. } => period - self.ckpt,
            Mode::Regular => unreachable!("proactive work outside a window"),
        };
        if segment <= 0.0 {
            return self.leave_window();
        }
        let rem_job = self.remaining_job();
        if rem_job <= segment {
            if rem_job <= 0.0 {
                return self.start_checkpoint(CkptKind::Final);
            }
            self.phase = Phase::Work {
                end: self.now + rem_job,
                proactive: true,
                finishes_job: true,
            };
        } else {
            self.phase = Phase::Work {
                end: self.now + segment,
                proactive: true,
                finishes_job: false,
            };
        }
        Ok(())
    }

    fn leave_window(&mut self) -> Result<(), SimError> {
        self.mode = Mode::Regular;
        note!(self, "window-exit", "resume W_reg={}", self.period_work)?;
        self.start_regular_work()
    }

    fn enter_window(&mut self, start: f64) -> Result<(), SimError> {
        self.pending = None;
        match self.policy.on_enter_proactive(start) {
            ProactivePlan::Resume => {
                note!(self, "window-enter", "resume")?;
                self.start_regular_work()
            }
            ProactivePlan::NoCheckpoint { until } => {
                self.mode = Mode::NoCheckpoint { until };
                note!(self, "window-enter", "no-checkpoint until={until}")?;
                self.start_proactive_work()
            }
            ProactivePlan::Periodic { period, count } => {
                self.mode = Mode::Periodic { period, left: count };
                note!(self, "window-enter", "periodic T_P={period} n={count}")?;
                self.start_proactive_work()
            }
        }
    }

    fn go_to_window(&mut self, start: f64) -> Result<(), SimError> {
        if start > self.now {
            self.phase = Phase::Idle { end: start };
            note!(self, "idle", "until={start}")
        } else {
            self.enter_window(start)
        }
    }

    fn complete_phase(&mut self) -> Result<(), SimError> {
        match self.phase {
            Phase::Work { finishes_job: true, .. } => self.start_checkpoint(CkptKind::Final),
            Phase::Work { proactive: false, .. } => {
                self.period_work = self.period - self.ckpt;
                self.start_checkpoint(CkptKind::Regular)
            }
            Phase::Work { proactive: true, .. } => match self.mode {
                Mode::Periodic { .. } => self.start_checkpoint(CkptKind::Proactive),
                _ => self.leave_window(),
            },
            Phase::Checkpoint { kind, .. } => {
                self.committed += self.uncommitted;
                self.uncommitted = 0.0;
                note!(self, "ckpt-end", "{} committed={}", kind.name(), self.committed)?;
                match kind {
                    CkptKind::Final => {
                        self.phase = Phase::Done;
                        Ok(())
                    }
                    CkptKind::Regular => {
                        self.counters.regular_ckpts += 1;
                        self.period_work = 0.0;
                        self.saved_period_work = 0.0;
                        match self.pending {
                            Some(start) => self.go_to_window(start),
                            None => self.start_regular_work(),
                        }
                    }
                    CkptKind::Extra => {
                        self.counters.extra_ckpts += 1;
                        self.saved_period_work = self.period_work;
                        let start = self.pending.expect("extra checkpoint without a pending window");
                        self.go_to_window(start)
                    }
                    CkptKind::Proactive => {
                        self.counters.proactive_ckpts += 1;
                        self.saved_period_work = self.period_work;
                        match self.mode {
                            Mode::Periodic { period, left } if left > 1 => {
                                self.mode = Mode::Periodic { period, left: left - 1 };
                                self.start_proactive_work()
                            }
                            _ => self.leave_window(),
                        }
                    }
                }
            }
            Phase::Idle { end } => self.enter_window(end),
            Phase::Down { .. } => {
                self.phase = Phase::Recover {
                    end: self.now + self.recovery,
                };
                note!(self, "recover", "until={}", self.now + self.recovery)
            }
            Phase::Recover { .. } => {
                self.mode = Mode::Regular;
                self.period_work = self.saved_period_work;
                note!(self, "resume", "W_reg={}", self.period_work)?;
                self.start_regular_work()
            }
            Phase::Done => Ok(()),
        }
    }

    fn on_fault(&mut self, predicted: bool) -> Result<(), SimError> {
        if predicted {
            self.counters.faults_predicted += 1;
        } else {
            self.counters.faults_unpredicted += 1;
        }
        let recovering = matches!(self.phase, Phase::Down { .. } | Phase::Recover { .. });
        if let Phase::Checkpoint { .. } = self.phase {
            self.counters.voided_ckpts += 1;
        }
        if !recovering {
            self.counters.rollbacks += 1;
        }
        note!(
            self,
            "fault",
            "{} lost={}",
            if predicted { "predicted" } else { "unpredicted" },
            self.uncommitted
        )?;
        self.lost += self.uncommitted;
        self.counters.lost_work += self.uncommitted;
        self.uncommitted = 0.0;
        self.period_work = self.saved_period_work;
        self.mode = Mode::Regular;
        self.pending = None;
        self.phase = Phase::Down {
            end: self.now + self.down,
        };
        Ok(())
    }

    fn situation(&self) -> Situation {
        match self.phase {
            Phase::Down { .. } | Phase::Recover { .. } => Situation::Recovering,
            _ if self.pending.is_some() || self.mode != Mode::Regular => Situation::Busy,
            Phase::Work { proactive: false, .. } => Situation::RegularWork {
                unprotected: self.uncommitted,
            },
            Phase::Checkpoint {
                kind: CkptKind::Regular | CkptKind::Final,
                ..
            } => Situation::RegularCheckpoint,
            _ => Situation::Busy,
        }
    }

    fn on_announcement(&mut self, event: TraceEvent) -> Result<(), SimError> {
        let start = event.window_start().expect("announcement carries a window");
        match event.kind {
            EventKind::TruePrediction { fault_time, .. } => {
                self.counters.true_predictions += 1;
                self.predicted.push(Reverse(FaultAt(fault_time)));
            }
            _ => self.counters.false_predictions += 1,
        }
        let action = self.policy.on_prediction(self.situation());
        note!(
            self,
            "prediction",
            "{} window={start} action={action:?}",
            if event.fault_time().is_some() { "true" } else { "false" }
        )?;
        match action {
            PredictionAction::Ignore => self.counters.predictions_ignored += 1,
            PredictionAction::Drop => self.counters.predictions_dropped += 1,
            PredictionAction::ExtraCheckpoint => {
                self.counters.predictions_trusted += 1;
                self.pending = Some(start);
                // Lead time is C: snap the checkpoint end onto the window start.
                let mut end = self.now + self.ckpt;
                if (end - start).abs() <= 1e-9 * start.abs().max(1.0) {
                    end = start;
                }
                self.phase = Phase::Checkpoint {
                    kind: CkptKind::Extra,
                    end,
                };
                note!(self, "ckpt-start", "extra")?;
            }
            PredictionAction::WaitForWindow => {
                self.counters.predictions_trusted += 1;
                self.pending = Some(start);
                if let Phase::Work { .. } = self.phase {
                    self.go_to_window(start)?;
                }
            }
        }
        Ok(())
    }

    fn run(mut self) -> Result<SimOutcome, SimError> {
        self.start_regular_work()?;
        loop {
            if let Phase::Done = self.phase {
                break;
            }
            if self.now > self.limit {
                return Err(SimError::NonTermination {
                    makespan: self.now,
                    limit: self.limit,
                    base_work: self.base_work,
                });
            }
            let phase_end = self.phase.end();
            let mut fault = self.predicted.peek().map_or(f64::INFINITY, |Reverse(f)| f.0);
            let mut fault_is_predicted = true;
            let mut announcement = f64::INFINITY;
            match self.events.peek() {
                Some(e) if e.kind == EventKind::UnpredictedFault => {
                    if e.time < fault {
                        fault = e.time;
                        fault_is_predicted = false;
                    }
                }
                Some(e) => announcement = e.time.max(self.now),
                None => {}
            }
            // Ties: phase completion, then fault, then announcement.
            if phase_end <= fault && phase_end <= announcement {
                self.advance(phase_end);
                self.complete_phase()?;
            } else if fault <= announcement {
                self.advance(fault);
                if fault_is_predicted {
                    self.predicted.pop();
                } else {
                    self.events.next();
                }
                self.on_fault(fault_is_predicted)?;
            } else {
                let event = self.events.next().expect("peeked announcement");
                self.advance(announcement);
                self.on_announcement(event)?;
            }
        }
        note!(self, "done", "makespan={}", self.now)?;
        Ok(SimOutcome {
            makespan: self.now,
            base_work: self.base_work,
            lost_work: self.lost,
            ckpt_time: self.ckpt_time,
            down_time: self.down_time,
            recovery_time: self.recovery_time,
            idle_time: self.idle_time,
            counters: self.counters,
        })
    }
}

pub(super) fn execute<I>(
    job: &JobSpec,
    spec: &StrategySpec,
    platform: &PlatformParams,
    pred: &PredictorParams,
    events: I,
    seed: u64,
    log: Option<&mut dyn Write>,
) -> Result<SimOutcome, SimError>
where
    I: IntoIterator<Item = TraceEvent>,
{
    let base_work = job.base_work().get();
    let engine = Engine {
        ckpt: platform.ckpt().get(),
        down: platform.down().get(),
        recovery: platform.recovery().get(),
        period: spec.period_tr().get(),
        base_work,
        limit: NON_TERMINATION_FACTOR * base_work,
        policy: PolicyState::new(*spec, pred, seed),
        events: events.into_iter().peekable(),
        predicted: BinaryHeap::new(),
        now: 0.0,
        phase: Phase::Done,
        mode: Mode::Regular,
        pending: None,
        committed: 0.0,
        uncommitted: 0.0,
        period_work: 0.0,
        saved_period_work: 0.0,
        lost: 0.0,
        ckpt_time: 0.0,
        down_time: 0.0,
        recovery_time: 0.0,
        idle_time: 0.0,
        counters: Counters::default(),
        log,
    };
    engine.run()
}
