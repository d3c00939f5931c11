//! Time-aligned sensor traces and gap-free datasets.
//!
//! A [`SensorTrace`] is the raw, per-node view: one reading per timeslot,
//! where a slot is either a valid value or a gap. Gaps are first-class and
//! never imputed here — ingestion decides whether to interpolate or reject
//! before the numeric modules see the data. A [`Dataset`] is the aligned,
//! gap-free view every downstream module consumes.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;

/// Readings of one physical sensor, one slot per entry. `None` marks a gap.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorTrace {
    node_id: String,
    unit: String,
    samples: Vec<Option<f64>>,
}

impl SensorTrace {
    pub fn new(node_id: impl Into<String>, unit: impl Into<String>, samples: Vec<Option<f64>>) -> Self {
        Self {
            node_id: node_id.into(),
            unit: unit.into(),
            samples,
        }
    }

    /// Trace with every slot valid.
    pub fn from_values(
        node_id: impl Into<String>,
        unit: impl Into<String>,
        values: Vec<f64>,
    ) -> Self {
        Self::new(node_id, unit, values.into_iter().map(Some).collect())
    }

    pub fn node_id(&self) -> &str {
        &self.node_id
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Option<f64>] {
        &self.samples
    }

    pub fn gap_count(&self) -> usize {
        self.samples.iter().filter(|s| s.is_none()).count()
    }

    /// Contiguous sub-trace of `len` slots starting at `start`, preserving
    /// node id and unit. With `allow_gaps` off, any gap inside the window is
    /// an error.
    pub fn window(&self, start: usize, len: usize, allow_gaps: bool) -> Result<SensorTrace, Error> {
        let end = start.checked_add(len).ok_or(Error::Range {
            start,
            len,
            available: self.samples.len(),
        })?;
        if end > self.samples.len() {
            return Err(Error::Range {
                start,
                len,
                available: self.samples.len(),
            });
        }
        let slice = &self.samples[start..end];
        if !allow_gaps {
            if let Some(offset) = slice.iter().position(|s| s.is_none()) {
                return Err(Error::Gap {
                    node_id: self.node_id.clone(),
                    slot: start + offset,
                });
            }
        }
        Ok(SensorTrace {
            node_id: self.node_id.clone(),
            unit: self.unit.clone(),
            samples: slice.to_vec(),
        })
    }

    /// All values of a gap-free trace; reports the first gap otherwise.
    pub fn values(&self) -> Result<Vec<f64>, Error> {
        self.samples
            .iter()
            .enumerate()
            .map(|(slot, s)| {
                s.ok_or(Error::Gap {
                    node_id: self.node_id.clone(),
                    slot,
                })
            })
            .collect()
    }
}

/// Aligned, gap-free readings for a set of nodes, ordered by node id.
///
/// All traces share the same length and slot indexing; node indices into the
/// dataset are stable for the lifetime of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    node_ids: Vec<String>,
    units: Vec<String>,
    values: Vec<Vec<f64>>,
    len: usize,
}

impl Dataset {
    /// Builds a dataset from gap-free traces of equal length. Traces are
    /// sorted by node id; duplicate ids are rejected.
    pub fn from_traces(traces: Vec<SensorTrace>) -> Result<Dataset, Error> {
        if traces.is_empty() {
            return Err(Error::Arity {
                what: "dataset traces",
                minimum: 1,
                got: 0,
            });
        }
        let mut traces = traces;
        traces.sort_by(|a, b| a.node_id.cmp(&b.node_id));
        for pair in traces.windows(2) {
            if pair[0].node_id == pair[1].node_id {
                return Err(Error::Comparison(alloc::format!(
                    "duplicate node id '{}'",
                    pair[0].node_id
                )));
            }
        }
        let len = traces[0].len();
        let mut node_ids = Vec::with_capacity(traces.len());
        let mut units = Vec::with_capacity(traces.len());
        let mut values = Vec::with_capacity(traces.len());
        for trace in traces {
            if trace.len() != len {
                return Err(Error::Size {
                    what: "trace length",
                    expected: len,
                    got: trace.len(),
                });
            }
            let vals = trace.values()?;
            node_ids.push(trace.node_id);
            units.push(trace.unit);
            values.push(vals);
        }
        Ok(Dataset {
            node_ids,
            units,
            values,
            len,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    /// Number of slots.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn node_id(&self, node: usize) -> &str {
        &self.node_ids[node]
    }

    pub fn unit(&self, node: usize) -> &str {
        &self.units[node]
    }

    pub fn values(&self, node: usize) -> &[f64] {
        &self.values[node]
    }

    pub fn value(&self, node: usize, slot: usize) -> f64 {
        self.values[node][slot]
    }
}
