//! Per-node energy accounting.
//!
//! Two accounting modes: events-only charges sensing and transmission events
//! and nothing else (the accounting the evaluation uses), full mode
//! additionally charges per-slot mode residency and per-transition switching
//! energy. Accumulators are kept in microjoules so event charges stay exact
//! integer arithmetic.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::config::{EnergyMode, SimConfig};
use crate::error::Error;
use crate::node::{NodeAction, NodeState};

/// Radio, sensing and mode power figures, plus the slot geometry they are
/// charged over. Defaults are the reference platform values.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyParams {
    pub msg_size_bytes: u32,
    pub tx_power_dbm: f64,
    /// Energy cost for sending one message.
    pub e_tx_msg_uj: f64,
    /// Energy cost for one sensing event.
    pub e_sense_uj: f64,
    /// Power draw while active.
    pub p_active_mw: f64,
    /// Power draw in the low power mode.
    pub p_lpm_mw: f64,
    /// Power draw while switching between low power and active.
    pub p_switch_mw: f64,
    /// Seconds charged per dormant/active transition.
    pub switch_duration_s: f64,
    pub slot_duration_s: f64,
    /// Fraction of an active slot spent awake.
    pub awake_fraction: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams {
            msg_size_bytes: 128,
            tx_power_dbm: 0.0,
            e_tx_msg_uj: 341.0,
            e_sense_uj: 330.0,
            p_active_mw: 4.898,
            p_lpm_mw: 0.144,
            p_switch_mw: 0.016,
            switch_duration_s: 0.01,
            slot_duration_s: 30.0,
            awake_fraction: 1.0,
        }
    }
}

impl EnergyParams {
    /// Default platform figures with slot geometry taken from the config.
    pub fn from_config(cfg: &SimConfig) -> EnergyParams {
        EnergyParams {
            switch_duration_s: cfg.switch_duration_s,
            slot_duration_s: cfg.slot_duration_s,
            awake_fraction: cfg.awake_fraction,
            ..EnergyParams::default()
        }
    }

    /// Comparisons are written negated so a NaN field counts as a violation.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), Error> {
        let positive = [
            ("e_tx_msg_uj", self.e_tx_msg_uj),
            ("e_sense_uj", self.e_sense_uj),
            ("p_active_mw", self.p_active_mw),
            ("p_lpm_mw", self.p_lpm_mw),
            ("p_switch_mw", self.p_switch_mw),
            ("slot_duration_s", self.slot_duration_s),
        ];
        let mut violations = Vec::new();
        for (field, value) in positive {
            if !(value > 0.0) {
                violations.push(crate::error::ConfigViolation {
                    field,
                    message: format!("must be > 0, got {value}"),
                });
            }
        }
        if !(self.awake_fraction > 0.0 && self.awake_fraction <= 1.0) {
            violations.push(crate::error::ConfigViolation {
                field: "awake_fraction",
                message: format!("must lie in (0, 1], got {}", self.awake_fraction),
            });
        }
        if !(self.switch_duration_s >= 0.0) {
            violations.push(crate::error::ConfigViolation {
                field: "switch_duration_s",
                message: format!("must be >= 0, got {}", self.switch_duration_s),
            });
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(violations))
        }
    }
}

/// Accumulated energy and event counts for one node.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NodeEnergy {
    pub e_sensing_uj: f64,
    pub e_tx_uj: f64,
    pub e_mode_uj: f64,
    pub e_switch_uj: f64,
    pub senses: u64,
    pub transmissions: u64,
    pub suppressions: u64,
    pub switches: u64,
    pub active_slots: u64,
    pub dormant_slots: u64,
}

impl NodeEnergy {
    pub fn total_uj(&self) -> f64 {
        self.e_sensing_uj + self.e_tx_uj + self.e_mode_uj + self.e_switch_uj
    }

    pub fn total_j(&self) -> f64 {
        self.total_uj() / 1e6
    }

    pub fn slots(&self) -> u64 {
        self.active_slots + self.dormant_slots
    }
}

/// Per-node energy accumulators for one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    params: EnergyParams,
    mode: EnergyMode,
    nodes: Vec<NodeEnergy>,
}

impl EnergyLedger {
    pub fn new(node_count: usize, params: EnergyParams, mode: EnergyMode) -> EnergyLedger {
        EnergyLedger {
            params,
            mode,
            nodes: vec![NodeEnergy::default(); node_count],
        }
    }

    pub fn mode(&self) -> EnergyMode {
        self.mode
    }

    pub fn params(&self) -> &EnergyParams {
        &self.params
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, node: usize) -> &NodeEnergy {
        &self.nodes[node]
    }

    /// Charges one slot of one node. Events-only mode adds the sensing cost
    /// per sensing event and the message cost per transmission; full mode
    /// additionally charges mode residency for the slot.
    pub fn tally_slot(&mut self, node: usize, action: &NodeAction, state: NodeState) {
        let p = self.params.clone();
        let entry = &mut self.nodes[node];
        match action {
            NodeAction::Slept => {
                entry.dormant_slots += 1;
            }
            NodeAction::SensedOnly(_) => {
                entry.active_slots += 1;
                entry.senses += 1;
                entry.suppressions += 1;
                entry.e_sensing_uj += p.e_sense_uj;
            }
            NodeAction::Transmitted(_) => {
                entry.active_slots += 1;
                entry.senses += 1;
                entry.transmissions += 1;
                entry.e_sensing_uj += p.e_sense_uj;
                entry.e_tx_uj += p.e_tx_msg_uj;
            }
        }
        if self.mode == EnergyMode::Full {
            let slot_s = p.slot_duration_s;
            let residency_mw_s = match state {
                NodeState::Active => {
                    p.p_active_mw * slot_s * p.awake_fraction
                        + p.p_lpm_mw * slot_s * (1.0 - p.awake_fraction)
                }
                NodeState::Dormant => p.p_lpm_mw * slot_s,
            };
            // mW · s = mJ; accumulators are µJ.
            entry.e_mode_uj += residency_mw_s * 1000.0;
        }
    }

    /// Charges one dormant/active transition (full mode only; events-only
    /// accounting ignores switching). The event count is kept either way.
    pub fn tally_switch(&mut self, node: usize) {
        let entry = &mut self.nodes[node];
        entry.switches += 1;
        if self.mode == EnergyMode::Full {
            entry.e_switch_uj += self.params.p_switch_mw * self.params.switch_duration_s * 1000.0;
        }
    }

    /// Per-node totals, combined totals for the given (Type-I, companion)
    /// pairs, and the grand total. With a baseline ledger the summary also
    /// carries the per-row energy ratios.
    pub fn summarize(
        &self,
        pairs: &[(usize, usize)],
        baseline: Option<&EnergyLedger>,
    ) -> Result<EnergySummary, Error> {
        if let Some(base) = baseline {
            if base.node_count() != self.node_count() {
                return Err(Error::Comparison(format!(
                    "node counts differ: {} vs {}",
                    self.node_count(),
                    base.node_count()
                )));
            }
            for (i, (a, b)) in self.nodes.iter().zip(&base.nodes).enumerate() {
                if a.slots() != b.slots() {
                    return Err(Error::Comparison(format!(
                        "node {} covers {} slots vs {} in the baseline",
                        i,
                        a.slots(),
                        b.slots()
                    )));
                }
            }
        }

        let per_node: Vec<NodeEnergyRow> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, e)| NodeEnergyRow {
                node: i,
                energy: *e,
                total_uj: e.total_uj(),
                ratio_vs_baseline: baseline.map(|b| ratio(e.total_uj(), b.nodes[i].total_uj())),
            })
            .collect();

        let pair_rows: Vec<PairEnergyRow> = pairs
            .iter()
            .map(|&(primary, companion)| {
                let combined = self.nodes[primary].total_uj() + self.nodes[companion].total_uj();
                PairEnergyRow {
                    primary,
                    companion,
                    combined_uj: combined,
                    ratio_vs_baseline: baseline.map(|b| {
                        ratio(
                            combined,
                            b.nodes[primary].total_uj() + b.nodes[companion].total_uj(),
                        )
                    }),
                }
            })
            .collect();

        let grand_total_uj: f64 = self.nodes.iter().map(|e| e.total_uj()).sum();
        let grand_ratio = baseline.map(|b| {
            ratio(
                grand_total_uj,
                b.nodes.iter().map(|e| e.total_uj()).sum::<f64>(),
            )
        });

        Ok(EnergySummary {
            mode: self.mode,
            per_node,
            pairs: pair_rows,
            grand_total_uj,
            grand_ratio_vs_baseline: grand_ratio,
        })
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else if a == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeEnergyRow {
    pub node: usize,
    pub energy: NodeEnergy,
    pub total_uj: f64,
    pub ratio_vs_baseline: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairEnergyRow {
    pub primary: usize,
    pub companion: usize,
    pub combined_uj: f64,
    pub ratio_vs_baseline: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergySummary {
    pub mode: EnergyMode,
    pub per_node: Vec<NodeEnergyRow>,
    pub pairs: Vec<PairEnergyRow>,
    pub grand_total_uj: f64,
    pub grand_ratio_vs_baseline: Option<f64>,
}

impl EnergySummary {
    pub fn grand_total_j(&self) -> f64 {
        self.grand_total_uj / 1e6
    }
}
