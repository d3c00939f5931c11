//! Data-collection phase machine: one training period, then repeating
//! operational/revalidation cycles, with revalidation able to escalate back
//! to training.

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// All nodes report; models are fitted and roles assigned.
    Training,
    /// Type-I nodes sleep; Type-II nodes suppress transmissions.
    Operational,
    /// All nodes report briefly; models are checked, refreshed or retrained.
    Revalidation,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Training => "training",
            Phase::Operational => "operational",
            Phase::Revalidation => "revalidation",
        }
    }
}

/// What a completed revalidation period decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevalidationOutcome {
    /// Models still hold; the operational period resumes.
    Continue,
    /// Correlations changed drastically; a new training period starts.
    Retrain,
}

/// Tracks the current phase and the slot index inside it.
///
/// Legal transitions: Training -> Operational, Operational -> Revalidation,
/// Revalidation -> Operational (on [`RevalidationOutcome::Continue`]) or
/// Revalidation -> Training (on [`RevalidationOutcome::Retrain`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseSchedule {
    pub training_len: usize,
    pub operational_len: usize,
    pub revalidation_len: usize,
    phase: Phase,
    phase_slot: usize,
}

impl PhaseSchedule {
    /// Starts in the training phase at slot 0. Lengths must already be
    /// validated (`T_p > 0`, `O_p > 0`, `0 < R_p < T_p`).
    pub fn new(training_len: usize, operational_len: usize, revalidation_len: usize) -> Self {
        PhaseSchedule {
            training_len,
            operational_len,
            revalidation_len,
            phase: Phase::Training,
            phase_slot: 0,
        }
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Index of the next slot within the current phase.
    pub fn phase_slot(&self) -> usize {
        self.phase_slot
    }

    pub fn phase_len(&self) -> usize {
        match self.phase {
            Phase::Training => self.training_len,
            Phase::Operational => self.operational_len,
            Phase::Revalidation => self.revalidation_len,
        }
    }

    /// Records one completed slot in the current phase.
    pub fn tick(&mut self) {
        self.phase_slot += 1;
    }

    /// True once every slot of the current phase has been recorded.
    pub fn at_boundary(&self) -> bool {
        self.phase_slot >= self.phase_len()
    }

    /// Moves to the next phase. Must be called exactly at a phase boundary;
    /// leaving revalidation requires the revalidation outcome.
    pub fn advance(&mut self, outcome: Option<RevalidationOutcome>) -> Result<(), Error> {
        if !self.at_boundary() {
            return Err(Error::State("advance_phase called mid-phase"));
        }
        self.phase = match (self.phase, outcome) {
            (Phase::Training, _) => Phase::Operational,
            (Phase::Operational, _) => Phase::Revalidation,
            (Phase::Revalidation, Some(RevalidationOutcome::Continue)) => Phase::Operational,
            (Phase::Revalidation, Some(RevalidationOutcome::Retrain)) => Phase::Training,
            (Phase::Revalidation, None) => {
                return Err(Error::State(
                    "leaving revalidation requires a revalidation outcome",
                ))
            }
        };
        self.phase_slot = 0;
        Ok(())
    }
}
