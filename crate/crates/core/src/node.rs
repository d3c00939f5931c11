//! Physical-sensor state machine: dormant/active states, the on-node mirror
//! predictor, and the transmit-suppression decision.
//!
//! The node and its sink-side virtual sensor run the same predictor on the
//! same reconstructed history, so a suppressed slot reconstructs to exactly
//! the value the node compared against — the ≤ epsilon reconstruction bound
//! is a protocol guarantee, not a statistical one.

use alloc::vec::Vec;

use crate::error::Error;
use crate::predict::TemporalFilter;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeState {
    /// Lowest power mode: no sensing, no radio.
    Dormant,
    Active,
}

/// Behavior of an active node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeMode {
    /// Sense and transmit every slot (training / revalidation).
    Unconditional,
    /// Sense every slot, transmit only when the mirror prediction misses by
    /// more than the error threshold.
    Suppression,
}

/// What a node did in one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeAction {
    Slept,
    /// Sensed, prediction was close enough, transmission suppressed.
    SensedOnly(f64),
    /// Sensed and transmitted the actual reading.
    Transmitted(f64),
}

/// Sink-to-node command, delivered at phase boundaries.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeCommand {
    /// Go dormant for the given number of slots.
    SleepFor(usize),
    /// Go active in suppression mode with synchronized filter coefficients.
    ActivateWith {
        coeffs: Vec<f64>,
        error_threshold: f64,
    },
    /// Go active and transmit unconditionally for the given number of slots.
    ReportAll(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NodeCounters {
    pub senses: u64,
    pub transmissions: u64,
    pub suppressions: u64,
    pub switches: u64,
}

/// One simulated sensor node.
#[derive(Debug, Clone)]
pub struct PhysicalNode {
    node: usize,
    state: NodeState,
    mode: NodeMode,
    mirror: TemporalFilter,
    /// Last reconstructed values, most recent first, at most `p` entries.
    /// Suppressed slots store the predicted value, transmitted slots the
    /// actual — the same rule the sink applies, which is what keeps the two
    /// filters synchronized.
    history: Vec<f64>,
    error_threshold: f64,
    sleep_remaining: usize,
    report_remaining: usize,
    counters: NodeCounters,
}

impl PhysicalNode {
    /// Node boots active with a zeroed mirror; the first command tells it
    /// what to do.
    pub fn new(node: usize, order: usize, learning_rate: f64, normalize_lms: bool) -> Self {
        PhysicalNode {
            node,
            state: NodeState::Active,
            mode: NodeMode::Unconditional,
            mirror: TemporalFilter::zeroed(order, learning_rate, normalize_lms),
            history: Vec::with_capacity(order),
            error_threshold: 0.0,
            sleep_remaining: 0,
            report_remaining: 0,
            counters: NodeCounters::default(),
        }
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn state(&self) -> NodeState {
        self.state
    }

    pub fn mode(&self) -> NodeMode {
        self.mode
    }

    pub fn mirror(&self) -> &TemporalFilter {
        &self.mirror
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }

    pub fn error_threshold(&self) -> f64 {
        self.error_threshold
    }

    pub fn sleep_remaining(&self) -> usize {
        self.sleep_remaining
    }

    pub fn counters(&self) -> &NodeCounters {
        &self.counters
    }

    /// Applies a sink command. Returns true when the dormant/active state
    /// actually toggled (the caller charges switching energy).
    ///
    /// Waking from dormancy clears the delay line: the pre-sleep history is
    /// stale while the sink's kept advancing, so continuity cannot be
    /// trusted. A suppression node refills it by transmitting (see `step`).
    pub fn apply_command(&mut self, command: &NodeCommand) -> bool {
        match command {
            NodeCommand::SleepFor(slots) => {
                let switched = self.state == NodeState::Active;
                self.state = NodeState::Dormant;
                self.sleep_remaining = *slots;
                self.report_remaining = 0;
                if switched {
                    self.counters.switches += 1;
                }
                switched
            }
            NodeCommand::ActivateWith {
                coeffs,
                error_threshold,
            } => {
                let switched = self.state == NodeState::Dormant;
                if switched {
                    self.wake();
                }
                self.state = NodeState::Active;
                self.mode = NodeMode::Suppression;
                self.mirror.sync_coeffs(coeffs);
                self.error_threshold = *error_threshold;
                self.sleep_remaining = 0;
                self.report_remaining = 0;
                switched
            }
            NodeCommand::ReportAll(slots) => {
                let switched = self.state == NodeState::Dormant;
                if switched {
                    self.wake();
                }
                self.state = NodeState::Active;
                self.mode = NodeMode::Unconditional;
                self.report_remaining = *slots;
                self.sleep_remaining = 0;
                switched
            }
        }
    }

    fn wake(&mut self) {
        self.history.clear();
        self.counters.switches += 1;
        self.sleep_remaining = 0;
    }

    /// One slot. Dormant nodes ignore the reading entirely; active nodes
    /// sense it and decide whether to transmit.
    pub fn step(&mut self, actual: f64) -> Result<NodeAction, Error> {
        match self.state {
            NodeState::Dormant => {
                if self.sleep_remaining == 0 {
                    return Err(Error::Protocol(
                        "dormant node stepped past its sleep window; recommand first",
                    ));
                }
                self.sleep_remaining -= 1;
                Ok(NodeAction::Slept)
            }
            NodeState::Active => match self.mode {
                NodeMode::Unconditional => {
                    if self.report_remaining == 0 {
                        return Err(Error::Protocol(
                            "reporting node stepped past its report window; recommand first",
                        ));
                    }
                    self.report_remaining -= 1;
                    self.counters.senses += 1;
                    if self.history.len() == self.mirror.order() {
                        let predicted = self.mirror.predict(&self.history)?;
                        self.mirror.lms_update(&self.history, actual, predicted)?;
                    }
                    self.push_history(actual);
                    self.counters.transmissions += 1;
                    Ok(NodeAction::Transmitted(actual))
                }
                NodeMode::Suppression => {
                    self.counters.senses += 1;
                    if self.history.len() < self.mirror.order() {
                        // Delay line still refilling after a wake: no
                        // prediction possible, transmit and skip adaptation.
                        self.push_history(actual);
                        self.counters.transmissions += 1;
                        return Ok(NodeAction::Transmitted(actual));
                    }
                    let predicted = self.mirror.predict(&self.history)?;
                    if (actual - predicted).abs() <= self.error_threshold {
                        // Tie suppresses: |e| exactly epsilon stays silent.
                        self.counters.suppressions += 1;
                        self.push_history(predicted);
                        Ok(NodeAction::SensedOnly(actual))
                    } else {
                        self.mirror.lms_update(&self.history, actual, predicted)?;
                        self.push_history(actual);
                        self.counters.transmissions += 1;
                        Ok(NodeAction::Transmitted(actual))
                    }
                }
            },
        }
    }

    fn push_history(&mut self, value: f64) {
        self.history.insert(0, value);
        self.history.truncate(self.mirror.order());
    }
}
