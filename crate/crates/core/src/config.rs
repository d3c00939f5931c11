//! Simulation configuration and its validation.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{ConfigViolation, Error};

/// How per-node energy is charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyMode {
    /// Only sensing and transmission events are charged. This matches the
    /// evaluation accounting and is the default.
    EventsOnly,
    /// Additionally charges mode residency per slot and switching energy per
    /// dormant/active transition.
    Full,
}

/// All knobs of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Transversal filter order `p` (taps over the signal's own past).
    pub filter_order: usize,
    /// LMS learning rate `mu`.
    pub learning_rate: f64,
    /// Normalize LMS steps by input power (on by default; keeps stability
    /// independent of signal scale).
    pub normalize_lms: bool,
    /// Transmit-suppression threshold `epsilon`, in signal units.
    pub error_threshold: f64,
    /// Minimum spatial fit score for a node to be admitted as a companion.
    pub delta_min: f64,
    /// Most companions a single virtual sensor may use.
    pub max_companions: usize,
    /// Training period length `T_p`, in slots.
    pub training_len: usize,
    /// Operational period length `O_p`, in slots.
    pub operational_len: usize,
    /// Revalidation period length `R_p`, in slots.
    pub revalidation_len: usize,
    /// Seconds per slot; 30 s matches the evaluation dataset's sampling.
    pub slot_duration_s: f64,
    pub energy_mode: EnergyMode,
    /// Fraction of an active slot spent awake (full mode accounting).
    pub awake_fraction: f64,
    /// Seconds charged per dormant/active transition (full mode accounting).
    pub switch_duration_s: f64,
    /// Mean absolute revalidation error above which retraining is triggered.
    pub retrain_error_limit: f64,
    /// Fit-score band within which role rotation treats candidates as tied
    /// and prefers the node with the higher active-slot count.
    pub rotation_band: f64,
    /// Base case: all nodes stay active and transmit every slot.
    pub no_vsf: bool,
    /// Echoed into reports; consumed by synthetic dataset generation.
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            filter_order: 4,
            learning_rate: 0.5,
            normalize_lms: true,
            error_threshold: 0.5,
            delta_min: 0.5,
            max_companions: 1,
            training_len: 100,
            operational_len: 20,
            revalidation_len: 5,
            slot_duration_s: 30.0,
            energy_mode: EnergyMode::EventsOnly,
            awake_fraction: 1.0,
            switch_duration_s: 0.01,
            retrain_error_limit: 1.0,
            rotation_band: 0.02,
            no_vsf: false,
            rng_seed: 0,
        }
    }
}

impl SimConfig {
    /// Checks every invariant and reports all violations, not just the first.
    ///
    /// Comparisons are written negated so a NaN field counts as a violation.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), Error> {
        let mut violations: Vec<ConfigViolation> = Vec::new();
        let mut report = |field: &'static str, message: alloc::string::String| {
            violations.push(ConfigViolation { field, message });
        };

        if self.filter_order < 1 {
            report("filter_order", format!("must be >= 1, got {}", self.filter_order));
        }
        if !(self.learning_rate > 0.0) {
            report("learning_rate", format!("must be > 0, got {}", self.learning_rate));
        }
        if !(self.error_threshold >= 0.0) {
            report(
                "error_threshold",
                format!("must be >= 0, got {}", self.error_threshold),
            );
        }
        if !(0.0..=1.0).contains(&self.delta_min) {
            report("delta_min", format!("must lie in [0, 1], got {}", self.delta_min));
        }
        if self.max_companions < 1 {
            report(
                "max_companions",
                format!("must be >= 1, got {}", self.max_companions),
            );
        }
        if self.training_len == 0 {
            report("training_len", "must be > 0".into());
        }
        if self.operational_len == 0 {
            report("operational_len", "must be > 0".into());
        }
        if self.revalidation_len == 0 {
            report("revalidation_len", "must be > 0".into());
        }
        // The training matrix needs T_p - p rows.
        if self.training_len <= self.filter_order {
            report(
                "training_len",
                format!(
                    "T_p must exceed p (T_p = {}, p = {})",
                    self.training_len, self.filter_order
                ),
            );
        }
        if self.revalidation_len >= self.training_len {
            report(
                "revalidation_len",
                format!(
                    "R_p must be less than T_p (R_p = {}, T_p = {})",
                    self.revalidation_len, self.training_len
                ),
            );
        }
        if !(self.slot_duration_s > 0.0) {
            report(
                "slot_duration_s",
                format!("must be > 0, got {}", self.slot_duration_s),
            );
        }
        if !(self.awake_fraction > 0.0 && self.awake_fraction <= 1.0) {
            report(
                "awake_fraction",
                format!("must lie in (0, 1], got {}", self.awake_fraction),
            );
        }
        if !(self.switch_duration_s >= 0.0) {
            report(
                "switch_duration_s",
                format!("must be >= 0, got {}", self.switch_duration_s),
            );
        }
        if !(self.retrain_error_limit > 0.0) {
            report(
                "retrain_error_limit",
                format!("must be > 0, got {}", self.retrain_error_limit),
            );
        }
        if !(self.rotation_band >= 0.0) {
            report(
                "rotation_band",
                format!("must be >= 0, got {}", self.rotation_band),
            );
        }

        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(violations))
        }
    }
}

/// Returns the configuration unchanged if every invariant holds.
pub fn validate_config(cfg: SimConfig) -> Result<SimConfig, Error> {
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_style_config_is_valid() {
        let cfg = SimConfig {
            training_len: 100,
            filter_order: 4,
            revalidation_len: 5,
            operational_len: 20,
            error_threshold: 0.5,
            ..SimConfig::default()
        };
        let validated = validate_config(cfg.clone()).unwrap();
        assert_eq!(validated, cfg);
    }

    #[test]
    fn training_window_must_exceed_filter_order() {
        let cfg = SimConfig {
            training_len: 4,
            filter_order: 4,
            ..SimConfig::default()
        };
        match cfg.validate() {
            Err(Error::Config(violations)) => {
                assert!(violations
                    .iter()
                    .any(|v| v.field == "training_len" && v.message.contains("T_p must exceed p")));
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn revalidation_must_be_shorter_than_training() {
        let cfg = SimConfig {
            revalidation_len: 200,
            training_len: 100,
            ..SimConfig::default()
        };
        match cfg.validate() {
            Err(Error::Config(violations)) => {
                assert!(violations.iter().any(|v| v.field == "revalidation_len"
                    && v.message.contains("R_p must be less than T_p")));
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn all_violations_reported_together() {
        let cfg = SimConfig {
            filter_order: 0,
            learning_rate: 0.0,
            delta_min: 2.0,
            awake_fraction: 0.0,
            ..SimConfig::default()
        };
        match cfg.validate() {
            Err(Error::Config(violations)) => {
                let fields: alloc::vec::Vec<_> = violations.iter().map(|v| v.field).collect();
                assert!(fields.contains(&"filter_order"));
                assert!(fields.contains(&"learning_rate"));
                assert!(fields.contains(&"delta_min"));
                assert!(fields.contains(&"awake_fraction"));
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn validation_is_idempotent() {
        let cfg = SimConfig::default();
        let once = validate_config(cfg).unwrap();
        let twice = validate_config(once.clone()).unwrap();
        assert_eq!(once, twice);
    }
}
