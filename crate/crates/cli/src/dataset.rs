//! Dataset ingestion: CSV loading in long or wide layout, timestamp
//! alignment by sorted rank, gap policy, and dataset export.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::path::Path;

use vsf_core::SensorTrace;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvLayout {
    /// Decide from the header: `timestamp,node_id,value` means long.
    Auto,
    /// One row per reading: `timestamp,node_id,value`.
    Long,
    /// One row per timestamp, one column per node.
    Wide,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapPolicy {
    /// Linear interpolation across interior gap runs up to the given
    /// length; longer runs and boundary gaps are errors.
    Interpolate { max_run: usize },
    /// Any gap is an error.
    Reject,
}

/// What `load_csv` produced: one trace per node on the union timestamp
/// grid, plus how many duplicate rows were overwritten (last wins).
#[derive(Debug, Clone)]
pub struct LoadedTraces {
    pub traces: Vec<SensorTrace>,
    pub duplicate_rows: usize,
}

/// Timestamps are mapped to slot indices by sorted rank, not by interval
/// arithmetic: real deployments jitter around their nominal sampling
/// period. Numeric timestamps sort numerically, anything else
/// lexicographically.
fn sort_timestamps(mut stamps: Vec<String>) -> Vec<String> {
    let all_numeric = stamps.iter().all(|s| s.parse::<f64>().is_ok());
    if all_numeric {
        stamps.sort_by(|a, b| {
            a.parse::<f64>()
                .unwrap()
                .partial_cmp(&b.parse::<f64>().unwrap())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    } else {
        stamps.sort();
    }
    stamps
}

pub fn load_csv(path: &Path, layout: CsvLayout, unit: &str) -> Result<LoadedTraces, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Data(format!("cannot open '{}': {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(file);

    let headers = reader
        .headers()
        .map_err(|e| CliError::Data(format!("'{}': cannot read header: {e}", path.display())))?
        .clone();
    if headers.len() < 2 {
        return Err(CliError::Data(format!(
            "'{}': need at least a timestamp column and one value column",
            path.display()
        )));
    }
    let layout = match layout {
        CsvLayout::Auto => {
            if headers.len() == 3 && &headers[1] == "node_id" && &headers[2] == "value" {
                CsvLayout::Long
            } else {
                CsvLayout::Wide
            }
        }
        explicit => explicit,
    };

    // node -> timestamp -> value, insertion-agnostic; last write wins.
    let mut cells: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    let mut stamps: Vec<String> = Vec::new();
    let mut seen_stamp = std::collections::HashSet::new();
    let mut duplicates = 0usize;
    let mut any_row = false;

    let parse_value = |raw: &str, line: u64| -> Result<Option<f64>, CliError> {
        if raw.is_empty() {
            return Ok(None);
        }
        raw.parse::<f64>().map(Some).map_err(|_| {
            CliError::Data(format!("line {line}: cannot parse value '{raw}'"))
        })
    };

    match layout {
        CsvLayout::Auto => unreachable!("resolved above"),
        CsvLayout::Long => {
            if headers.len() != 3 {
                return Err(CliError::Data(format!(
                    "'{}': long layout needs exactly timestamp,node_id,value columns",
                    path.display()
                )));
            }
            for record in reader.records() {
                let record =
                    record.map_err(|e| CliError::Data(format!("'{}': {e}", path.display())))?;
                let line = record.position().map_or(0, |p| p.line());
                any_row = true;
                let stamp = record[0].to_string();
                let node = record[1].to_string();
                if node.is_empty() {
                    return Err(CliError::Data(format!("line {line}: empty node id")));
                }
                let value = parse_value(&record[2], line)?;
                if seen_stamp.insert(stamp.clone()) {
                    stamps.push(stamp.clone());
                }
                if let Some(value) = value {
                    if cells
                        .entry(node)
                        .or_default()
                        .insert(stamp, value)
                        .is_some()
                    {
                        duplicates += 1;
                    }
                }
            }
        }
        CsvLayout::Wide => {
            let nodes: Vec<String> = headers.iter().skip(1).map(|h| h.to_string()).collect();
            if nodes.iter().any(|n| n.is_empty()) {
                return Err(CliError::Data(format!(
                    "'{}': empty node column name in header",
                    path.display()
                )));
            }
            for record in reader.records() {
                let record =
                    record.map_err(|e| CliError::Data(format!("'{}': {e}", path.display())))?;
                let line = record.position().map_or(0, |p| p.line());
                any_row = true;
                let stamp = record[0].to_string();
                let fresh = seen_stamp.insert(stamp.clone());
                if fresh {
                    stamps.push(stamp.clone());
                } else {
                    duplicates += 1;
                }
                for (node, raw) in nodes.iter().zip(record.iter().skip(1)) {
                    if let Some(value) = parse_value(raw, line)? {
                        cells
                            .entry(node.clone())
                            .or_default()
                            .insert(stamp.clone(), value);
                    } else {
                        cells.entry(node.clone()).or_default().remove(&stamp);
                    }
                }
            }
        }
    }

    if !any_row {
        return Err(CliError::Data(format!(
            "'{}': no data rows",
            path.display()
        )));
    }

    let grid = sort_timestamps(stamps);
    let traces = cells
        .into_iter()
        .map(|(node, series)| {
            let samples: Vec<Option<f64>> =
                grid.iter().map(|stamp| series.get(stamp).copied()).collect();
            SensorTrace::new(node, unit, samples)
        })
        .collect();
    Ok(LoadedTraces {
        traces,
        duplicate_rows: duplicates,
    })
}

/// Fills or rejects gaps, producing traces ready for
/// `Dataset::from_traces`. Interpolated values always lie between their
/// anchors.
pub fn align_traces(
    traces: Vec<SensorTrace>,
    policy: GapPolicy,
) -> Result<Vec<SensorTrace>, CliError> {
    let mut aligned = Vec::with_capacity(traces.len());
    for trace in traces {
        let node = trace.node_id().to_string();
        let unit = trace.unit().to_string();
        let samples = trace.samples();
        match policy {
            GapPolicy::Reject => {
                if let Some(slot) = samples.iter().position(|s| s.is_none()) {
                    return Err(CliError::Data(format!(
                        "node '{node}': gap at slot {slot} (policy: reject)"
                    )));
                }
                aligned.push(trace);
            }
            GapPolicy::Interpolate { max_run } => {
                let mut values: Vec<f64> = Vec::with_capacity(samples.len());
                let mut slot = 0usize;
                while slot < samples.len() {
                    match samples[slot] {
                        Some(v) => {
                            values.push(v);
                            slot += 1;
                        }
                        None => {
                            let run_start = slot;
                            while slot < samples.len() && samples[slot].is_none() {
                                slot += 1;
                            }
                            let run = slot - run_start;
                            if run_start == 0 || slot == samples.len() {
                                return Err(CliError::Data(format!(
                                    "node '{node}': boundary gap at slots {run_start}..{} has no anchor",
                                    slot.saturating_sub(1)
                                )));
                            }
                            if run > max_run {
                                return Err(CliError::Data(format!(
                                    "node '{node}': gap run of {run} slots at {run_start}..{} exceeds max_run {max_run}",
                                    slot - 1
                                )));
                            }
                            let left = values[run_start - 1];
                            let right = samples[slot].unwrap();
                            for k in 0..run {
                                let frac = (k + 1) as f64 / (run + 1) as f64;
                                values.push(left + (right - left) * frac);
                            }
                        }
                    }
                }
                aligned.push(SensorTrace::from_values(node, unit, values));
            }
        }
    }
    Ok(aligned)
}

/// Writes gap-free traces as a wide CSV with the slot index as timestamp.
/// Floats print in shortest round-trip form, so a load of the written file
/// reproduces the values exactly.
pub fn write_dataset<W: std::io::Write>(
    out: W,
    traces: &[SensorTrace],
) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header = vec!["timestamp".to_string()];
    header.extend(traces.iter().map(|t| t.node_id().to_string()));
    writer
        .write_record(&header)
        .map_err(write_err)?;
    let len = traces.first().map_or(0, |t| t.len());
    for slot in 0..len {
        let mut row = vec![slot.to_string()];
        for trace in traces {
            let value = trace.samples()[slot]
                .map(|v| v.to_string())
                .unwrap_or_default();
            row.push(value);
        }
        writer.write_record(&row).map_err(write_err)?;
    }
    writer.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

fn write_err(e: impl fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}
