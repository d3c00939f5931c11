//! CSV serialization of simulation reports. Floats print in shortest
//! round-trip form, so identical reports serialize to identical bytes.

use std::io::Write;

use vsf_core::engine::Role;
use vsf_core::sim::{Comparison, SimReport};

use crate::error::CliError;

fn opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Per-slot records: `slots.csv`.
pub fn write_slots<W: Write>(out: W, report: &SimReport) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "slot",
        "node_id",
        "phase",
        "actual",
        "reconstructed",
        "abs_error",
        "source",
        "action",
    ])
    .map_err(csv_err)?;
    for r in &report.records {
        w.write_record([
            r.slot.to_string(),
            report.node_ids[r.node].clone(),
            r.phase.as_str().to_string(),
            r.actual.to_string(),
            r.reconstructed.to_string(),
            r.abs_error.to_string(),
            r.source.as_str().to_string(),
            r.action.as_str().to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

/// Per-node aggregates: `summary.csv`.
pub fn write_summary<W: Write>(out: W, report: &SimReport) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "node_id",
        "role",
        "mean_abs_error",
        "mean_abs_error_predicted",
        "std_abs_error_predicted",
        "max_abs_error",
        "predicted_slots",
        "senses",
        "transmissions",
        "suppressions",
        "dormant_slots",
    ])
    .map_err(csv_err)?;
    for a in &report.aggregates {
        let role = report
            .final_roles
            .as_ref()
            .map(|assignment| match assignment.roles[a.node] {
                Role::TypeI => "type1",
                Role::TypeII => "type2",
            })
            .unwrap_or("");
        w.write_record([
            report.node_ids[a.node].clone(),
            role.to_string(),
            a.mean_abs_error.to_string(),
            opt(a.mean_abs_error_predicted),
            opt(a.std_abs_error_predicted),
            a.max_abs_error.to_string(),
            a.predicted_slots.to_string(),
            a.senses.to_string(),
            a.transmissions.to_string(),
            a.suppressions.to_string(),
            a.dormant_slots.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

/// Energy breakdown per node, per (Type-I, companion) pair and overall:
/// `energy.csv`.
pub fn write_energy<W: Write>(out: W, report: &SimReport) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "scope",
        "node_id",
        "companion_id",
        "e_sensing_uj",
        "e_tx_uj",
        "e_mode_uj",
        "e_switch_uj",
        "total_uj",
        "total_j",
    ])
    .map_err(csv_err)?;
    for row in &report.energy.per_node {
        let e = &row.energy;
        w.write_record([
            "node".to_string(),
            report.node_ids[row.node].clone(),
            String::new(),
            e.e_sensing_uj.to_string(),
            e.e_tx_uj.to_string(),
            e.e_mode_uj.to_string(),
            e.e_switch_uj.to_string(),
            row.total_uj.to_string(),
            (row.total_uj / 1e6).to_string(),
        ])
        .map_err(csv_err)?;
    }
    for pair in &report.energy.pairs {
        w.write_record([
            "pair".to_string(),
            report.node_ids[pair.primary].clone(),
            report.node_ids[pair.companion].clone(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            pair.combined_uj.to_string(),
            (pair.combined_uj / 1e6).to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.write_record([
        "total".to_string(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        report.energy.grand_total_uj.to_string(),
        report.energy.grand_total_j().to_string(),
    ])
    .map_err(csv_err)?;
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

/// Side-by-side VSF vs baseline rows: `comparison.csv`.
pub fn write_comparison<W: Write>(out: W, table: &Comparison) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "scope",
        "node_id",
        "vsf_energy_uj",
        "baseline_energy_uj",
        "energy_ratio",
        "vsf_transmissions",
        "baseline_transmissions",
        "vsf_mean_abs_error",
        "baseline_mean_abs_error",
    ])
    .map_err(csv_err)?;
    for row in &table.rows {
        let (scope, node_id) = match row.node {
            Some(i) => ("node", table.node_ids[i].clone()),
            None => ("combined", String::new()),
        };
        w.write_record([
            scope.to_string(),
            node_id,
            row.energy_a_uj.to_string(),
            row.energy_b_uj.to_string(),
            row.energy_ratio.to_string(),
            row.transmissions_a.to_string(),
            row.transmissions_b.to_string(),
            row.mean_abs_error_a.to_string(),
            row.mean_abs_error_b.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

/// One sweep result row, aggregated over all nodes of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub operational_len: usize,
    pub revalidation_len: usize,
    pub mean_abs_error: f64,
    pub mean_abs_error_predicted: Option<f64>,
    pub std_abs_error_predicted: Option<f64>,
    pub transmissions: u64,
    pub suppressions: u64,
    pub dormant_slots: u64,
    pub type1_count: usize,
    pub energy_total_uj: f64,
}

impl SweepRow {
    /// Pools every node's records of one run into one grid-point row.
    pub fn from_report(report: &SimReport) -> SweepRow {
        let mut sum_all = 0.0;
        let mut sum_pred = 0.0;
        let mut sum_pred_sq = 0.0;
        let mut count_pred = 0usize;
        for r in &report.records {
            sum_all += r.abs_error;
            if r.source == vsf_core::engine::Source::Predicted {
                sum_pred += r.abs_error;
                sum_pred_sq += r.abs_error * r.abs_error;
                count_pred += 1;
            }
        }
        let count_all = report.records.len().max(1) as f64;
        let (mean_pred, std_pred) = if count_pred > 0 {
            let mean = sum_pred / count_pred as f64;
            let var = (sum_pred_sq / count_pred as f64 - mean * mean).max(0.0);
            (Some(mean), Some(var.sqrt()))
        } else {
            (None, None)
        };
        SweepRow {
            epsilon: report.config.error_threshold,
            operational_len: report.config.operational_len,
            revalidation_len: report.config.revalidation_len,
            mean_abs_error: sum_all / count_all,
            mean_abs_error_predicted: mean_pred,
            std_abs_error_predicted: std_pred,
            transmissions: report.aggregates.iter().map(|a| a.transmissions).sum(),
            suppressions: report.aggregates.iter().map(|a| a.suppressions).sum(),
            dormant_slots: report.aggregates.iter().map(|a| a.dormant_slots).sum(),
            type1_count: report
                .final_roles
                .as_ref()
                .map_or(0, |a| a.type1_count()),
            energy_total_uj: report.energy.grand_total_uj,
        }
    }
}

/// Sweep results, one row per grid point in grid order: `sweep.csv`.
pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "epsilon",
        "operational_len",
        "revalidation_len",
        "mean_abs_error",
        "mean_abs_error_predicted",
        "std_abs_error_predicted",
        "transmissions",
        "suppressions",
        "dormant_slots",
        "type1_count",
        "energy_total_uj",
        "energy_total_j",
    ])
    .map_err(csv_err)?;
    for row in rows {
        w.write_record([
            row.epsilon.to_string(),
            row.operational_len.to_string(),
            row.revalidation_len.to_string(),
            row.mean_abs_error.to_string(),
            opt(row.mean_abs_error_predicted),
            opt(row.std_abs_error_predicted),
            row.transmissions.to_string(),
            row.suppressions.to_string(),
            row.dormant_slots.to_string(),
            row.type1_count.to_string(),
            row.energy_total_uj.to_string(),
            (row.energy_total_uj / 1e6).to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}
