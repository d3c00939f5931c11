//! Deterministic slot-driven simulation: drives the phase machine, routes
//! node-to-sink messages, and coordinates engine, nodes and energy ledger.
//!
//! One simulation is one sequential event loop; all randomness lives in the
//! dataset, so identical config and data reproduce identical reports
//! bit-for-bit. The sink only ever reads node values that were transmitted;
//! ground truth from the dataset appears solely in the report's error
//! columns, which are the experimenter's view.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::config::SimConfig;
use crate::energy::{EnergyLedger, EnergyParams, EnergySummary};
use crate::engine::{
    pairwise_scores, revalidate, rotate_roles, select_companions, Role, RoleAssignment, Source,
    VirtualSensor,
};
use crate::error::Error;
use crate::node::{NodeAction, NodeCommand, NodeState, PhysicalNode};
use crate::phase::{Phase, PhaseSchedule, RevalidationOutcome};
use crate::predict::{variance, FitTracker, SpatialRegressor, TemporalFilter};
use crate::trace::Dataset;

/// Condensed per-slot action for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    Slept,
    SensedOnly,
    Transmitted,
}

impl ActionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ActionKind::Slept => "slept",
            ActionKind::SensedOnly => "sensed_only",
            ActionKind::Transmitted => "transmitted",
        }
    }

    fn from_action(action: &NodeAction) -> ActionKind {
        match action {
            NodeAction::Slept => ActionKind::Slept,
            NodeAction::SensedOnly(_) => ActionKind::SensedOnly,
            NodeAction::Transmitted(_) => ActionKind::Transmitted,
        }
    }
}

/// One node's view of one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotRecord {
    pub slot: usize,
    pub node: usize,
    pub phase: Phase,
    pub actual: f64,
    pub reconstructed: f64,
    pub abs_error: f64,
    pub source: Source,
    pub action: ActionKind,
}

/// Per-node error and event aggregates over a whole run.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeAggregate {
    pub node: usize,
    pub mean_abs_error: f64,
    pub max_abs_error: f64,
    /// Slots reconstructed without a transmission.
    pub predicted_slots: usize,
    pub mean_abs_error_predicted: Option<f64>,
    pub std_abs_error_predicted: Option<f64>,
    pub senses: u64,
    pub transmissions: u64,
    pub suppressions: u64,
    pub dormant_slots: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseSpan {
    pub phase: Phase,
    pub start_slot: usize,
    pub len: usize,
    /// True when the dataset ran out mid-phase.
    pub partial: bool,
}

/// Everything one run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub node_ids: Vec<String>,
    pub records: Vec<SlotRecord>,
    pub aggregates: Vec<NodeAggregate>,
    pub energy: EnergySummary,
    pub phase_timeline: Vec<PhaseSpan>,
    /// Role assignment in force when the run ended (absent for baseline and
    /// base-case runs).
    pub final_roles: Option<RoleAssignment>,
    pub config: SimConfig,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SimKind {
    /// Full virtual sensing: dormancy, companions, revalidation, rotation.
    Vsf,
    /// Dual-prediction-only baseline: every node stays active in
    /// suppression mode after the same training fit, no dormancy, no
    /// spatial prediction, no revalidation.
    BaselineLms,
}

/// Stepwise simulation state. [`run_simulation`] and [`run_baseline_lms`]
/// are the one-shot entry points; the stepwise form exists so tests can
/// inspect node and sink state between slots.
pub struct Simulation<'a> {
    cfg: SimConfig,
    data: &'a Dataset,
    kind: SimKind,
    schedule: PhaseSchedule,
    nodes: Vec<PhysicalNode>,
    sensors: Vec<VirtualSensor>,
    assignment: Option<RoleAssignment>,
    ledger: EnergyLedger,
    records: Vec<SlotRecord>,
    spans: Vec<PhaseSpan>,
    span_start: usize,
    active_slots: Vec<u64>,
    slot: usize,
    finished: bool,
}

impl<'a> Simulation<'a> {
    pub fn new(cfg: &SimConfig, data: &'a Dataset) -> Result<Simulation<'a>, Error> {
        Self::with_kind(cfg, data, SimKind::Vsf)
    }

    fn with_kind(cfg: &SimConfig, data: &'a Dataset, kind: SimKind) -> Result<Simulation<'a>, Error> {
        cfg.validate()?;
        let needed = cfg.training_len + cfg.operational_len + cfg.revalidation_len;
        if data.len() < needed {
            return Err(Error::Size {
                what: "dataset slots",
                expected: needed,
                got: data.len(),
            });
        }
        let n = data.node_count();
        let nodes: Vec<PhysicalNode> = (0..n)
            .map(|i| PhysicalNode::new(i, cfg.filter_order, cfg.learning_rate, cfg.normalize_lms))
            .collect();
        // The baseline never leaves its single operational period.
        let operational_len = match kind {
            SimKind::Vsf => cfg.operational_len,
            SimKind::BaselineLms => data.len(),
        };
        let schedule = PhaseSchedule::new(cfg.training_len, operational_len, cfg.revalidation_len);
        let ledger = EnergyLedger::new(n, EnergyParams::from_config(cfg), cfg.energy_mode);

        let mut sim = Simulation {
            cfg: cfg.clone(),
            data,
            kind,
            schedule,
            nodes,
            sensors: Vec::new(),
            assignment: None,
            ledger,
            records: Vec::new(),
            spans: Vec::new(),
            span_start: 0,
            active_slots: vec![0; n],
            slot: 0,
            finished: false,
        };
        // Initial command: everyone reports. The base case reports forever.
        let report_len = if cfg.no_vsf {
            data.len()
        } else {
            cfg.training_len
        };
        for i in 0..n {
            if sim.nodes[i].apply_command(&NodeCommand::ReportAll(report_len)) {
                sim.ledger.tally_switch(i);
            }
        }
        Ok(sim)
    }

    pub fn nodes(&self) -> &[PhysicalNode] {
        &self.nodes
    }

    pub fn virtual_sensors(&self) -> &[VirtualSensor] {
        &self.sensors
    }

    pub fn assignment(&self) -> Option<&RoleAssignment> {
        self.assignment.as_ref()
    }

    pub fn phase(&self) -> Phase {
        self.schedule.phase()
    }

    pub fn slot(&self) -> usize {
        self.slot
    }

    /// Runs one slot. Returns false once the dataset is exhausted.
    pub fn step(&mut self) -> Result<bool, Error> {
        if self.finished {
            return Ok(false);
        }
        if self.slot == self.data.len() {
            self.finish_spans();
            self.finished = true;
            return Ok(false);
        }

        if self.cfg.no_vsf {
            self.step_report_all(Phase::Training)?;
            self.slot += 1;
            return Ok(true);
        }

        let phase = self.schedule.phase();
        match phase {
            Phase::Training | Phase::Revalidation => self.step_report_all(phase)?,
            Phase::Operational => self.step_operational()?,
        }

        self.schedule.tick();
        if self.schedule.at_boundary() {
            self.on_boundary(phase)?;
        }
        self.slot += 1;
        Ok(true)
    }

    /// Consumes the remaining slots and assembles the report.
    pub fn run(mut self) -> Result<SimReport, Error> {
        while self.step()? {}
        self.into_report()
    }

    fn step_report_all(&mut self, phase: Phase) -> Result<(), Error> {
        let slot = self.slot;
        for i in 0..self.data.node_count() {
            let actual = self.data.value(i, slot);
            let action = self.nodes[i].step(actual)?;
            debug_assert!(matches!(action, NodeAction::Transmitted(_)));
            self.ledger.tally_slot(i, &action, self.nodes[i].state());
            self.active_slots[i] += 1;
            self.records.push(SlotRecord {
                slot,
                node: i,
                phase,
                actual,
                reconstructed: actual,
                abs_error: 0.0,
                source: Source::Measured,
                action: ActionKind::from_action(&action),
            });
        }
        Ok(())
    }

    fn step_operational(&mut self) -> Result<(), Error> {
        let slot = self.slot;
        let n = self.data.node_count();

        let mut actions: Vec<NodeAction> = Vec::with_capacity(n);
        for i in 0..n {
            let actual = self.data.value(i, slot);
            actions.push(self.nodes[i].step(actual)?);
        }

        // Sink pass: active sensors first, so every Type-I sensor finds its
        // companions' reconstructed values for this slot already computed.
        let mut reconstructed = vec![0.0f64; n];
        for i in 0..n {
            if self.sensors[i].role() == Role::TypeII {
                let message = match actions[i] {
                    NodeAction::Transmitted(v) => Some(v),
                    _ => None,
                };
                reconstructed[i] = self.sensors[i].step_type2(message)?;
            }
        }
        for i in 0..n {
            if self.sensors[i].role() == Role::TypeI {
                let companion_values: Vec<f64> = self.sensors[i]
                    .companions()
                    .iter()
                    .map(|&c| reconstructed[c])
                    .collect();
                reconstructed[i] = self.sensors[i].step_type1(&companion_values)?;
            }
        }

        for i in 0..n {
            let actual = self.data.value(i, slot);
            let state = self.nodes[i].state();
            self.ledger.tally_slot(i, &actions[i], state);
            if state == NodeState::Active {
                self.active_slots[i] += 1;
            }
            let source = match actions[i] {
                NodeAction::Transmitted(_) => Source::Measured,
                _ => Source::Predicted,
            };
            let value = reconstructed[i];
            self.records.push(SlotRecord {
                slot,
                node: i,
                phase: Phase::Operational,
                actual,
                reconstructed: value,
                abs_error: (actual - value).abs(),
                source,
                action: ActionKind::from_action(&actions[i]),
            });
        }
        Ok(())
    }

    fn on_boundary(&mut self, completed: Phase) -> Result<(), Error> {
        match completed {
            Phase::Training => {
                let start = self.slot + 1 - self.cfg.training_len;
                self.finish_training(start)?;
                self.close_span(Phase::Training, false);
                self.schedule.advance(None)?;
            }
            Phase::Operational => {
                if self.kind == SimKind::BaselineLms {
                    // Unreachable: the baseline's operational period spans
                    // the whole dataset.
                    return Err(Error::State("baseline operational period ended"));
                }
                for i in 0..self.data.node_count() {
                    let woke = self.nodes[i].apply_command(&NodeCommand::ReportAll(
                        self.cfg.revalidation_len,
                    ));
                    if woke {
                        self.ledger.tally_switch(i);
                        self.sensors[i].mark_node_wake();
                    }
                }
                self.close_span(Phase::Operational, false);
                self.schedule.advance(None)?;
            }
            Phase::Revalidation => {
                let start = self.slot + 1 - self.cfg.revalidation_len;
                let report = revalidate(&mut self.sensors, self.data, start, &self.cfg)?;
                self.close_span(Phase::Revalidation, false);
                match report.outcome {
                    RevalidationOutcome::Continue => {
                        self.rotate(start)?;
                        self.command_operational();
                        self.schedule.advance(Some(RevalidationOutcome::Continue))?;
                    }
                    RevalidationOutcome::Retrain => {
                        for i in 0..self.data.node_count() {
                            // Every node is already active and reporting.
                            let woke = self.nodes[i]
                                .apply_command(&NodeCommand::ReportAll(self.cfg.training_len));
                            if woke {
                                self.ledger.tally_switch(i);
                                self.sensors[i].mark_node_wake();
                            }
                        }
                        self.schedule.advance(Some(RevalidationOutcome::Retrain))?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Fits every node's predictors over the just-finished training window,
    /// assigns roles and commands the fleet.
    fn finish_training(&mut self, start: usize) -> Result<(), Error> {
        let cfg = &self.cfg;
        let n = self.data.node_count();
        let t = cfg.training_len;
        let p = cfg.filter_order;

        let mut temporals = Vec::with_capacity(n);
        let mut gammas = Vec::with_capacity(n);
        let mut sigmas = Vec::with_capacity(n);
        for i in 0..n {
            let window = &self.data.values(i)[start..start + t];
            let filter =
                TemporalFilter::fit(window, p, cfg.learning_rate, cfg.normalize_lms)?;
            // In-sample one-step predictions over the training rows.
            let mut predictions = Vec::with_capacity(t - p);
            for target in p..t {
                let mut history = Vec::with_capacity(p);
                for lag in 1..=p {
                    history.push(window[target - lag]);
                }
                predictions.push(filter.predict(&history)?);
            }
            let sigma2 = variance(window);
            let gamma =
                FitTracker::from_residuals(&window[p..], &predictions, (t - 1) as u32, sigma2)?;
            temporals.push(filter);
            gammas.push(gamma);
            sigmas.push(sigma2);
        }

        let assignment = if self.kind == SimKind::BaselineLms {
            None
        } else if n >= 2 && t >= p + 3 {
            let scores = pairwise_scores(self.data, start, t, p)?;
            Some(select_companions(&scores, cfg.delta_min, cfg.max_companions)?)
        } else {
            Some(RoleAssignment::all_type2(n))
        };

        let mut sensors = Vec::with_capacity(n);
        for i in 0..n {
            let role = assignment
                .as_ref()
                .map_or(Role::TypeII, |a| a.roles[i]);
            let companions = assignment
                .as_ref()
                .map_or(Vec::new(), |a| a.companions[i].clone());
            let (spatial, delta) = if role == Role::TypeI {
                let (regressor, tracker) = self.fit_spatial_over(
                    i,
                    &companions,
                    start + p,
                    t - p,
                    sigmas[i],
                    (t - 1) as u32,
                )?;
                (Some(regressor), Some(tracker))
            } else {
                (None, None)
            };
            let window = &self.data.values(i)[start..start + t];
            let mut history = Vec::with_capacity(p);
            for lag in 1..=p {
                history.push(window[t - lag]);
            }
            sensors.push(VirtualSensor::new(
                i,
                role,
                temporals[i].clone(),
                spatial,
                gammas[i].clone(),
                delta,
                companions,
                history,
            )?);
        }
        self.sensors = sensors;
        self.assignment = assignment;
        self.command_operational();
        Ok(())
    }

    /// Multivariate spatial fit of node `node` on `companions` over
    /// `window` slots starting at `start`, plus the matching δ tracker.
    fn fit_spatial_over(
        &self,
        node: usize,
        companions: &[usize],
        start: usize,
        window: usize,
        sigma2: f64,
        nu: u32,
    ) -> Result<(SpatialRegressor, FitTracker), Error> {
        let dependent = &self.data.values(node)[start..start + window];
        let inputs: Vec<&[f64]> = companions
            .iter()
            .map(|&c| &self.data.values(c)[start..start + window])
            .collect();
        let regressor = SpatialRegressor::fit(dependent, &inputs)?;
        let mut predictions = Vec::with_capacity(window);
        for row in 0..window {
            let values: Vec<f64> = companions
                .iter()
                .map(|&c| self.data.value(c, start + row))
                .collect();
            predictions.push(regressor.predict(&values)?);
        }
        let tracker = FitTracker::from_residuals(dependent, &predictions, nu, sigma2)?;
        Ok((regressor, tracker))
    }

    /// Re-runs the greedy selection on the just-finished revalidation window
    /// and rebuilds whatever the new assignment changed.
    fn rotate(&mut self, window_start: usize) -> Result<(), Error> {
        if self.kind == SimKind::BaselineLms {
            return Ok(());
        }
        let Some(previous) = self.assignment.as_ref() else {
            return Ok(());
        };
        let window = self.cfg.revalidation_len;
        let n = self.data.node_count();
        if n < 2 || window < 3 {
            // Window too short to score any pair; keep the assignment.
            return Ok(());
        }
        let fresh = pairwise_scores(self.data, window_start, window, 0)?;
        let mut next = rotate_roles(
            previous,
            &fresh,
            &self.active_slots,
            self.cfg.rotation_band,
            self.cfg.delta_min,
            self.cfg.max_companions,
        )?;
        // The multivariate refit needs window >= k + 2 rows.
        for companions in &mut next.companions {
            companions.truncate(window - 2);
        }

        let nu = (window - 1) as u32;
        for i in 0..n {
            match next.roles[i] {
                Role::TypeII => {
                    self.sensors[i].demote_to_type2();
                }
                Role::TypeI => {
                    let companions = next.companions[i].clone();
                    let unchanged = self.sensors[i].role() == Role::TypeI
                        && self.sensors[i].companions() == companions.as_slice();
                    if !unchanged {
                        let sigma2 = variance(
                            &self.data.values(i)[window_start..window_start + window],
                        );
                        let (regressor, tracker) = self.fit_spatial_over(
                            i,
                            &companions,
                            window_start,
                            window,
                            sigma2,
                            nu,
                        )?;
                        self.sensors[i].promote_to_type1(companions, regressor, tracker);
                    }
                }
            }
        }
        self.assignment = Some(next);
        Ok(())
    }

    /// Commands the fleet into the next operational period: Type-I nodes
    /// sleep, Type-II nodes run suppression with synchronized coefficients.
    fn command_operational(&mut self) {
        let n = self.data.node_count();
        for i in 0..n {
            let role = self.sensors[i].role();
            let command = match role {
                Role::TypeI => NodeCommand::SleepFor(self.cfg.operational_len),
                Role::TypeII => NodeCommand::ActivateWith {
                    coeffs: self.sensors[i].temporal().coeffs().to_vec(),
                    error_threshold: self.cfg.error_threshold,
                },
            };
            let switched = self.nodes[i].apply_command(&command);
            if switched {
                self.ledger.tally_switch(i);
                if role == Role::TypeII {
                    self.sensors[i].mark_node_wake();
                }
            }
        }
    }

    fn close_span(&mut self, phase: Phase, partial: bool) {
        let end = self.slot + 1;
        self.spans.push(PhaseSpan {
            phase,
            start_slot: self.span_start,
            len: end - self.span_start,
            partial,
        });
        self.span_start = end;
    }

    fn finish_spans(&mut self) {
        if self.span_start < self.slot {
            let phase = if self.cfg.no_vsf {
                Phase::Training
            } else {
                self.schedule.phase()
            };
            let complete =
                self.cfg.no_vsf || self.schedule.phase_slot() >= self.schedule.phase_len();
            self.spans.push(PhaseSpan {
                phase,
                start_slot: self.span_start,
                len: self.slot - self.span_start,
                partial: !complete,
            });
            self.span_start = self.slot;
        }
    }

    fn into_report(self) -> Result<SimReport, Error> {
        let n = self.data.node_count();
        let mut aggregates = Vec::with_capacity(n);
        for i in 0..n {
            let mut sum_all = 0.0;
            let mut max_all = 0.0f64;
            let mut count_all = 0usize;
            let mut sum_pred = 0.0;
            let mut sum_pred_sq = 0.0;
            let mut count_pred = 0usize;
            for record in self.records.iter().filter(|r| r.node == i) {
                sum_all += record.abs_error;
                max_all = max_all.max(record.abs_error);
                count_all += 1;
                if record.source == Source::Predicted {
                    sum_pred += record.abs_error;
                    sum_pred_sq += record.abs_error * record.abs_error;
                    count_pred += 1;
                }
            }
            let counters = self.nodes[i].counters();
            let (mean_pred, std_pred) = if count_pred > 0 {
                let mean = sum_pred / count_pred as f64;
                let var = (sum_pred_sq / count_pred as f64 - mean * mean).max(0.0);
                (Some(mean), Some(libm::sqrt(var)))
            } else {
                (None, None)
            };
            aggregates.push(NodeAggregate {
                node: i,
                mean_abs_error: if count_all > 0 {
                    sum_all / count_all as f64
                } else {
                    0.0
                },
                max_abs_error: max_all,
                predicted_slots: count_pred,
                mean_abs_error_predicted: mean_pred,
                std_abs_error_predicted: std_pred,
                senses: counters.senses,
                transmissions: counters.transmissions,
                suppressions: counters.suppressions,
                dormant_slots: self.ledger.node(i).dormant_slots,
            });
        }

        let pairs: Vec<(usize, usize)> = self
            .assignment
            .as_ref()
            .map(|a| {
                let mut pairs = Vec::new();
                for (node, role) in a.roles.iter().enumerate() {
                    if *role == Role::TypeI {
                        for &companion in &a.companions[node] {
                            pairs.push((node, companion));
                        }
                    }
                }
                pairs
            })
            .unwrap_or_default();
        let energy = self.ledger.summarize(&pairs, None)?;

        Ok(SimReport {
            node_ids: self.data.node_ids().to_vec(),
            records: self.records,
            aggregates,
            energy,
            phase_timeline: self.spans,
            final_roles: self.assignment,
            config: self.cfg.clone(),
            rng_seed: self.cfg.rng_seed,
        })
    }
}

/// Full virtual sensing run over an aligned dataset.
pub fn run_simulation(cfg: &SimConfig, data: &Dataset) -> Result<SimReport, Error> {
    Simulation::with_kind(cfg, data, SimKind::Vsf)?.run()
}

/// Dual-prediction baseline: all nodes stay active in suppression mode after
/// an identical training fit; no dormancy, no companions, no revalidation.
pub fn run_baseline_lms(cfg: &SimConfig, data: &Dataset) -> Result<SimReport, Error> {
    let cfg = SimConfig {
        no_vsf: false,
        ..cfg.clone()
    };
    Simulation::with_kind(&cfg, data, SimKind::BaselineLms)?.run()
}

/// One row of a side-by-side run comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    /// Node index, or `None` for the combined (all-node) row.
    pub node: Option<usize>,
    pub energy_a_uj: f64,
    pub energy_b_uj: f64,
    pub energy_ratio: f64,
    pub transmissions_a: u64,
    pub transmissions_b: u64,
    pub mean_abs_error_a: f64,
    pub mean_abs_error_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub node_ids: Vec<String>,
    pub rows: Vec<CompareRow>,
}

/// Side-by-side comparison of two reports over the same dataset, slot range
/// and error threshold.
pub fn compare(a: &SimReport, b: &SimReport) -> Result<Comparison, Error> {
    if a.node_ids != b.node_ids {
        return Err(Error::Comparison("node sets differ".into()));
    }
    if a.records.len() != b.records.len() {
        return Err(Error::Comparison(alloc::format!(
            "slot ranges differ: {} vs {} records",
            a.records.len(),
            b.records.len()
        )));
    }
    if a.config.error_threshold != b.config.error_threshold {
        return Err(Error::Comparison(alloc::format!(
            "error thresholds differ: {} vs {}",
            a.config.error_threshold,
            b.config.error_threshold
        )));
    }

    let ratio = |x: f64, y: f64| {
        if y > 0.0 {
            x / y
        } else if x == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    };

    let mut rows = Vec::with_capacity(a.node_ids.len() + 1);
    for i in 0..a.node_ids.len() {
        let ea = a.energy.per_node[i].total_uj;
        let eb = b.energy.per_node[i].total_uj;
        rows.push(CompareRow {
            node: Some(i),
            energy_a_uj: ea,
            energy_b_uj: eb,
            energy_ratio: ratio(ea, eb),
            transmissions_a: a.aggregates[i].transmissions,
            transmissions_b: b.aggregates[i].transmissions,
            mean_abs_error_a: a.aggregates[i].mean_abs_error,
            mean_abs_error_b: b.aggregates[i].mean_abs_error,
        });
    }
    let tx_a: u64 = a.aggregates.iter().map(|x| x.transmissions).sum();
    let tx_b: u64 = b.aggregates.iter().map(|x| x.transmissions).sum();
    let n_records = a.records.len().max(1) as f64;
    let mae_a = a.records.iter().map(|r| r.abs_error).sum::<f64>() / n_records;
    let mae_b = b.records.iter().map(|r| r.abs_error).sum::<f64>() / n_records;
    rows.push(CompareRow {
        node: None,
        energy_a_uj: a.energy.grand_total_uj,
        energy_b_uj: b.energy.grand_total_uj,
        energy_ratio: ratio(a.energy.grand_total_uj, b.energy.grand_total_uj),
        transmissions_a: tx_a,
        transmissions_b: tx_b,
        mean_abs_error_a: mae_a,
        mean_abs_error_b: mae_b,
    });

    Ok(Comparison {
        node_ids: a.node_ids.clone(),
        rows,
    })
}
