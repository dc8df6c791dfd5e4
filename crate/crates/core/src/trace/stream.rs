use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand_chacha::ChaCha8Rng;

use super::{fault_process, EventKind, Keyed, Renewal, TraceConfig, TraceEvent};
use crate::rng::{self, Stream};

/// Unbounded, lazily generated event sequence in merge order.
///
/// A predicted fault is announced up to `I + lead` before it strikes, so
/// events are buffered until both source processes have advanced far enough
/// that nothing earlier can still appear.
pub struct TraceStream {
    config: TraceConfig,
    faults: Box<dyn Iterator<Item = (f64, bool)> + Send>,
    false_preds: Option<Renewal<ChaCha8Rng>>,
    offsets: ChaCha8Rng,
    pending: BinaryHeap<Reverse<Keyed>>,
    fault_bound: f64,
    false_bound: f64,
    fault_index: u64,
    false_index: u64,
}

impl TraceStream {
    pub fn new(config: TraceConfig, seed: u64) -> Self {
        let false_preds = config
            .false_law()
            .map(|law| Renewal::new(&law, rng::stream(seed, Stream::FalsePredictions)));
        TraceStream {
            faults: Box::new(fault_process(&config.fault_law, config.recall, seed)),
            false_bound: if false_preds.is_some() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            },
            false_preds,
            offsets: rng::stream(seed, Stream::WindowOffsets),
            pending: BinaryHeap::new(),
            fault_bound: f64::NEG_INFINITY,
            fault_index: 0,
            false_index: 0,
            config,
        }
    }

    pub fn config(&self) -> &TraceConfig {
        &self.config
    }

    fn pull_fault(&mut self) {
        let (t, predicted) = self.faults.next().expect("renewal processes are unbounded");
        let event = if predicted {
            let off = self.config.window_offset(&mut self.offsets);
            self.config.true_prediction(t, off)
        } else {
            TraceEvent {
                time: t,
                kind: EventKind::UnpredictedFault,
            }
        };
        self.pending.push(Reverse(Keyed {
            event,
            index: self.fault_index,
        }));
        self.fault_index += 1;
        self.fault_bound = t - self.config.window.get() - self.config.lead.get();
    }

    fn pull_false(&mut self) {
        let Some(process) = self.false_preds.as_mut() else {
            return;
        };
        let s = process.next().expect("renewal processes are unbounded");
        self.pending.push(Reverse(Keyed {
            event: self.config.false_prediction(s),
            index: self.false_index,
        }));
        self.false_index += 1;
        self.false_bound = s - self.config.lead.get();
    }
}

impl Iterator for TraceStream {
    type Item = TraceEvent;

    fn next(&mut self) -> Option<TraceEvent> {
        loop {
            // Later events are announced strictly after the smaller bound.
            let bound = self.fault_bound.min(self.false_bound);
            if let Some(Reverse(top)) = self.pending.peek() {
                if top.event.time < bound {
                    return self.pending.pop().map(|Reverse(k)| k.event);
                }
            }
            if self.fault_bound <= self.false_bound {
                self.pull_fault();
            } else {
                self.pull_false();
            }
        }
    }
}
