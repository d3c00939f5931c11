//! Command-line surface: run one experiment, sweep a parameter grid,
//! compare against the LMS-only baseline, or emit a synthetic dataset.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use vsf_core::sim::{compare, run_baseline_lms, run_simulation, SimReport};
use vsf_core::{Dataset, SimConfig};

use crate::dataset::{align_traces, load_csv, write_dataset};
use crate::error::CliError;
use crate::report_io::{
    write_comparison, write_energy, write_slots, write_summary, write_sweep, SweepRow,
};
use crate::settings::{load_settings, RunSettings};
use crate::synth::generate_synthetic;

#[derive(Debug, Parser)]
#[command(
    name = "vsf",
    about = "Virtual sensing simulator: dormant sensors reconstructed at the sink \
             through adaptive temporal filters and companion regression",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run settings file (flat key = value lines).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Dataset CSV; omit to generate from the config's synth_* keys.
    #[arg(long, value_name = "PATH")]
    pub data: Option<PathBuf>,
    /// Output directory, created if absent.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Overwrite existing output files.
    #[arg(long)]
    pub force: bool,
    /// Override the config's rng_seed.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and write slots.csv, summary.csv and energy.csv.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated subset of {slots,summary,energy} to emit.
        #[arg(long, value_name = "LIST", default_value = "slots,summary,energy")]
        emit: String,
    },
    /// Run every grid point and write one sweep.csv row per point.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Grid axis: `epsilon=0,0.5,1` or `window=(20,5),(20,10)`.
        /// Repeat the flag to sweep the cross product.
        #[arg(long, value_name = "SPEC")]
        grid: Vec<String>,
    },
    /// Run the simulation and the LMS-only baseline on the same inputs and
    /// write comparison.csv.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Generate the config's synthetic dataset and write dataset.csv.
    Synth {
        #[command(flatten)]
        common: CommonArgs,
    },
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { common, emit } => cmd_run(&common, &emit),
        Command::Sweep { common, grid } => cmd_sweep(&common, &grid),
        Command::Compare { common } => cmd_compare(&common),
        Command::Synth { common } => cmd_synth(&common),
    }
}

fn settings_for(common: &CommonArgs) -> Result<RunSettings, CliError> {
    let mut settings = load_settings(&common.config)?;
    if let Some(seed) = common.seed {
        settings.sim.rng_seed = seed;
        if let Some(synth) = settings.synth.as_mut() {
            synth.rng_seed = seed;
        }
    }
    Ok(settings)
}

fn obtain_dataset(settings: &RunSettings, data: &Option<PathBuf>) -> Result<Dataset, CliError> {
    let traces = match data {
        Some(path) => {
            let loaded = load_csv(path, settings.layout, &settings.unit)?;
            if loaded.duplicate_rows > 0 {
                eprintln!(
                    "warning: {} duplicate rows overwritten (last wins)",
                    loaded.duplicate_rows
                );
            }
            align_traces(loaded.traces, settings.gap_policy)?
        }
        None => match &settings.synth {
            Some(spec) => generate_synthetic(spec)?,
            None => {
                return Err(CliError::Config(
                    "no dataset: pass --data or configure synth_nodes/synth_len/synth_base".into(),
                ))
            }
        },
    };
    Dataset::from_traces(traces).map_err(CliError::from)
}

/// Creates the output directory and enforces the overwrite guard for every
/// file the command is about to write.
fn prepare_out(dir: &Path, files: &[&str], force: bool) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create '{}': {e}", dir.display())))?;
    if !force {
        for name in files {
            let path = dir.join(name);
            if path.exists() {
                return Err(CliError::Io(format!(
                    "'{}' exists; pass --force to overwrite",
                    path.display()
                )));
            }
        }
    }
    Ok(())
}

fn create(dir: &Path, name: &str) -> Result<File, CliError> {
    let path = dir.join(name);
    File::create(&path).map_err(|e| CliError::Io(format!("cannot write '{}': {e}", path.display())))
}

fn cmd_run(common: &CommonArgs, emit: &str) -> Result<(), CliError> {
    let mut wanted = Vec::new();
    for item in emit.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "slots" | "summary" | "energy" => wanted.push(item.to_string()),
            other => {
                return Err(CliError::Config(format!(
                    "unknown --emit item '{other}' (expected slots, summary, energy)"
                )))
            }
        }
    }
    if wanted.is_empty() {
        return Err(CliError::Config("--emit selected nothing".into()));
    }

    let settings = settings_for(common)?;
    let data = obtain_dataset(&settings, &common.data)?;
    let report = run_simulation(&settings.sim, &data)?;

    let files: Vec<&str> = wanted
        .iter()
        .map(|w| match w.as_str() {
            "slots" => "slots.csv",
            "summary" => "summary.csv",
            _ => "energy.csv",
        })
        .collect();
    prepare_out(&common.out, &files, common.force)?;
    for item in &wanted {
        match item.as_str() {
            "slots" => write_slots(create(&common.out, "slots.csv")?, &report)?,
            "summary" => write_summary(create(&common.out, "summary.csv")?, &report)?,
            _ => write_energy(create(&common.out, "energy.csv")?, &report)?,
        }
    }
    Ok(())
}

/// One grid point: overrides applied to the base config.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub epsilon: Option<f64>,
    pub window: Option<(usize, usize)>,
}

impl GridPoint {
    pub fn apply(&self, base: &SimConfig) -> SimConfig {
        let mut cfg = base.clone();
        if let Some(eps) = self.epsilon {
            cfg.error_threshold = eps;
        }
        if let Some((operational, revalidation)) = self.window {
            cfg.operational_len = operational;
            cfg.revalidation_len = revalidation;
        }
        cfg
    }
}

/// Expands `--grid` specs into the cross product of their axes, preserving
/// grid order.
pub fn expand_grid(specs: &[String]) -> Result<Vec<GridPoint>, CliError> {
    let mut epsilons: Option<Vec<f64>> = None;
    let mut windows: Option<Vec<(usize, usize)>> = None;
    for spec in specs {
        let (axis, values) = spec.split_once('=').ok_or_else(|| {
            CliError::Config(format!("grid spec '{spec}' needs axis=value,..."))
        })?;
        match axis.trim() {
            "epsilon" => {
                let mut parsed = Vec::new();
                for v in values.split(',').map(str::trim).filter(|v| !v.is_empty()) {
                    parsed.push(v.parse::<f64>().map_err(|_| {
                        CliError::Config(format!("bad epsilon '{v}' in grid spec"))
                    })?);
                }
                if parsed.is_empty() {
                    return Err(CliError::Config("empty epsilon grid".into()));
                }
                epsilons = Some(parsed);
            }
            "window" => {
                let mut parsed = Vec::new();
                for pair in values.split("),").map(|p| p.trim_matches(&['(', ')', ' '][..])) {
                    if pair.is_empty() {
                        continue;
                    }
                    let (o, r) = pair.split_once(',').ok_or_else(|| {
                        CliError::Config(format!("bad window pair '({pair})' in grid spec"))
                    })?;
                    let parse = |s: &str| {
                        s.trim().parse::<usize>().map_err(|_| {
                            CliError::Config(format!("bad window length '{s}' in grid spec"))
                        })
                    };
                    parsed.push((parse(o)?, parse(r)?));
                }
                if parsed.is_empty() {
                    return Err(CliError::Config("empty window grid".into()));
                }
                windows = Some(parsed);
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown grid axis '{other}' (expected epsilon or window)"
                )))
            }
        }
    }
    let points = match (epsilons, windows) {
        (None, None) => Vec::new(),
        (Some(es), None) => es
            .into_iter()
            .map(|e| GridPoint {
                epsilon: Some(e),
                window: None,
            })
            .collect(),
        (None, Some(ws)) => ws
            .into_iter()
            .map(|w| GridPoint {
                epsilon: None,
                window: Some(w),
            })
            .collect(),
        (Some(es), Some(ws)) => {
            let mut points = Vec::with_capacity(es.len() * ws.len());
            for &w in &ws {
                for &e in &es {
                    points.push(GridPoint {
                        epsilon: Some(e),
                        window: Some(w),
                    });
                }
            }
            points
        }
    };
    Ok(points)
}

fn cmd_sweep(common: &CommonArgs, grid: &[String]) -> Result<(), CliError> {
    let points = expand_grid(grid)?;
    if points.is_empty() {
        return Err(CliError::Config(
            "empty grid: pass --grid epsilon=... and/or --grid window=...".into(),
        ));
    }
    let settings = settings_for(common)?;
    let data = obtain_dataset(&settings, &common.data)?;
    prepare_out(&common.out, &["sweep.csv"], common.force)?;

    let mut rows = Vec::with_capacity(points.len());
    let mut failures = 0usize;
    for point in &points {
        let cfg = point.apply(&settings.sim);
        match cfg
            .validate()
            .map_err(vsf_core::Error::from)
            .and_then(|()| run_simulation(&cfg, &data))
        {
            Ok(report) => rows.push(SweepRow::from_report(&report)),
            Err(err) => {
                failures += 1;
                eprintln!(
                    "grid point epsilon={:?} window={:?} failed: {err}",
                    point.epsilon, point.window
                );
            }
        }
    }
    write_sweep(create(&common.out, "sweep.csv")?, &rows)?;
    if failures > 0 {
        return Err(CliError::Config(format!(
            "{failures} of {} grid points failed",
            points.len()
        )));
    }
    Ok(())
}

fn cmd_compare(common: &CommonArgs) -> Result<(), CliError> {
    let settings = settings_for(common)?;
    let data = obtain_dataset(&settings, &common.data)?;
    prepare_out(&common.out, &["comparison.csv"], common.force)?;
    let vsf = run_simulation(&settings.sim, &data)?;
    let baseline = run_baseline_lms(&settings.sim, &data)?;
    let table = compare(&vsf, &baseline).map_err(CliError::from)?;
    write_comparison(create(&common.out, "comparison.csv")?, &table)
}

fn cmd_synth(common: &CommonArgs) -> Result<(), CliError> {
    let settings = settings_for(common)?;
    let Some(spec) = settings.synth.as_ref() else {
        return Err(CliError::Config(
            "synth needs synth_nodes, synth_len and synth_base in the config".into(),
        ));
    };
    let traces = generate_synthetic(spec)?;
    prepare_out(&common.out, &["dataset.csv"], common.force)?;
    write_dataset(create(&common.out, "dataset.csv")?, &traces)
}

/// Convenience for tests: run a full simulation for given settings text and
/// an in-memory dataset.
pub fn simulate_settings(settings: &RunSettings, data: &Dataset) -> Result<SimReport, CliError> {
    run_simulation(&settings.sim, data).map_err(CliError::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_expansion_preserves_order() {
        let points =
            expand_grid(&["epsilon=0,0.5,1".to_string(), "window=(20,5),(20,10)".to_string()])
                .unwrap();
        assert_eq!(points.len(), 6);
        assert_eq!(points[0].epsilon, Some(0.0));
        assert_eq!(points[0].window, Some((20, 5)));
        assert_eq!(points[3].epsilon, Some(0.0));
        assert_eq!(points[3].window, Some((20, 10)));
    }

    #[test]
    fn single_axis_grids_work() {
        let points = expand_grid(&["epsilon=0.25".to_string()]).unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].window, None);

        let points = expand_grid(&["window=(40,5)".to_string()]).unwrap();
        assert_eq!(points, vec![GridPoint { epsilon: None, window: Some((40, 5)) }]);
    }

    #[test]
    fn bad_grid_specs_are_config_errors() {
        assert!(expand_grid(&["epsilon=a,b".to_string()]).is_err());
        assert!(expand_grid(&["window=(20)".to_string()]).is_err());
        assert!(expand_grid(&["window=(20,x)".to_string()]).is_err());
        assert!(expand_grid(&["energy=1".to_string()]).is_err());
    }
}
