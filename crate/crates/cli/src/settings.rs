//! Flat key-value run settings: simulation knobs, dataset handling policy,
//! and an optional synthetic dataset spec. Unknown keys are errors so typos
//! cannot silently fall back to defaults; missing keys take the documented
//! defaults.

use std::path::Path;

use vsf_core::{EnergyMode, SimConfig};

use crate::dataset::{CsvLayout, GapPolicy};
use crate::error::CliError;
use crate::synth::{AffineLink, BaseProcess, SyntheticSpec};

/// Everything a run needs beyond the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub sim: SimConfig,
    pub layout: CsvLayout,
    pub gap_policy: GapPolicy,
    /// Unit label attached to loaded traces.
    pub unit: String,
    pub synth: Option<SyntheticSpec>,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            sim: SimConfig::default(),
            layout: CsvLayout::Auto,
            gap_policy: GapPolicy::Interpolate { max_run: 3 },
            unit: String::new(),
            synth: None,
        }
    }
}

pub fn load_settings(path: &Path) -> Result<RunSettings, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read '{}': {e}", path.display())))?;
    parse_settings(&text)
}

pub fn parse_settings(text: &str) -> Result<RunSettings, CliError> {
    let mut settings = RunSettings::default();
    let mut synth_nodes: Option<usize> = None;
    let mut synth_len: Option<usize> = None;
    let mut synth_base: Option<BaseProcess> = None;
    let mut synth_start: f64 = 20.0;
    let mut synth_links: Vec<AffineLink> = Vec::new();
    let mut gap_max_run: usize = 3;
    let mut gap_reject = false;
    let mut errors: Vec<String> = Vec::new();

    for (line_no, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errors.push(format!("line {}: expected 'key = value'", line_no + 1));
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        let mut bad = |what: &str| {
            errors.push(format!("line {}: {key}: {what} (got '{value}')", line_no + 1));
        };

        match key {
            "filter_order" => match value.parse() {
                Ok(v) => settings.sim.filter_order = v,
                Err(_) => bad("expected an integer"),
            },
            "learning_rate" => match value.parse() {
                Ok(v) => settings.sim.learning_rate = v,
                Err(_) => bad("expected a number"),
            },
            "normalize_lms" => match value.parse() {
                Ok(v) => settings.sim.normalize_lms = v,
                Err(_) => bad("expected true or false"),
            },
            "error_threshold" => match value.parse() {
                Ok(v) => settings.sim.error_threshold = v,
                Err(_) => bad("expected a number"),
            },
            "delta_min" => match value.parse() {
                Ok(v) => settings.sim.delta_min = v,
                Err(_) => bad("expected a number"),
            },
            "max_companions" => match value.parse() {
                Ok(v) => settings.sim.max_companions = v,
                Err(_) => bad("expected an integer"),
            },
            "training_len" => match value.parse() {
                Ok(v) => settings.sim.training_len = v,
                Err(_) => bad("expected an integer"),
            },
            "operational_len" => match value.parse() {
                Ok(v) => settings.sim.operational_len = v,
                Err(_) => bad("expected an integer"),
            },
            "revalidation_len" => match value.parse() {
                Ok(v) => settings.sim.revalidation_len = v,
                Err(_) => bad("expected an integer"),
            },
            "slot_duration_s" => match value.parse() {
                Ok(v) => settings.sim.slot_duration_s = v,
                Err(_) => bad("expected a number"),
            },
            "energy_mode" => match value {
                "events" => settings.sim.energy_mode = EnergyMode::EventsOnly,
                "full" => settings.sim.energy_mode = EnergyMode::Full,
                _ => bad("expected 'events' or 'full'"),
            },
            "awake_fraction" => match value.parse() {
                Ok(v) => settings.sim.awake_fraction = v,
                Err(_) => bad("expected a number"),
            },
            "switch_duration_s" => match value.parse() {
                Ok(v) => settings.sim.switch_duration_s = v,
                Err(_) => bad("expected a number"),
            },
            "retrain_error_limit" => match value.parse() {
                Ok(v) => settings.sim.retrain_error_limit = v,
                Err(_) => bad("expected a number"),
            },
            "rotation_band" => match value.parse() {
                Ok(v) => settings.sim.rotation_band = v,
                Err(_) => bad("expected a number"),
            },
            "no_vsf" => match value.parse() {
                Ok(v) => settings.sim.no_vsf = v,
                Err(_) => bad("expected true or false"),
            },
            "rng_seed" => match value.parse() {
                Ok(v) => settings.sim.rng_seed = v,
                Err(_) => bad("expected an integer"),
            },
            "unit" => settings.unit = value.to_string(),
            "csv_layout" => match value {
                "auto" => settings.layout = CsvLayout::Auto,
                "long" => settings.layout = CsvLayout::Long,
                "wide" => settings.layout = CsvLayout::Wide,
                _ => bad("expected auto, long or wide"),
            },
            "gap_policy" => match value {
                "interpolate" => gap_reject = false,
                "reject" => gap_reject = true,
                _ => bad("expected interpolate or reject"),
            },
            "gap_max_run" => match value.parse() {
                Ok(v) => gap_max_run = v,
                Err(_) => bad("expected an integer"),
            },
            "synth_nodes" => match value.parse() {
                Ok(v) => synth_nodes = Some(v),
                Err(_) => bad("expected an integer"),
            },
            "synth_len" => match value.parse() {
                Ok(v) => synth_len = Some(v),
                Err(_) => bad("expected an integer"),
            },
            "synth_start" => match value.parse() {
                Ok(v) => synth_start = v,
                Err(_) => bad("expected a number"),
            },
            "synth_base" => match parse_base(value) {
                Ok(base) => synth_base = Some(base),
                Err(msg) => bad(&msg),
            },
            "synth_links" => match parse_links(value) {
                Ok(links) => synth_links = links,
                Err(msg) => bad(&msg),
            },
            _ => errors.push(format!("line {}: unknown key '{key}'", line_no + 1)),
        }
    }

    settings.gap_policy = if gap_reject {
        GapPolicy::Reject
    } else {
        GapPolicy::Interpolate {
            max_run: gap_max_run,
        }
    };

    match (synth_nodes, synth_len, synth_base) {
        (None, None, None) => {
            if !synth_links.is_empty() {
                errors.push("synth_links given without synth_nodes/synth_len/synth_base".into());
            }
        }
        (Some(nodes), Some(len), Some(base)) => {
            settings.synth = Some(SyntheticSpec {
                node_count: nodes,
                length: len,
                start_value: synth_start,
                base,
                links: synth_links,
                rng_seed: settings.sim.rng_seed,
            });
        }
        _ => errors.push(
            "synthetic datasets need all of synth_nodes, synth_len and synth_base".into(),
        ),
    }

    if !errors.is_empty() {
        return Err(CliError::Config(errors.join("; ")));
    }
    settings.sim.validate().map_err(CliError::from)?;
    Ok(settings)
}

/// `ar1:<coeff>:<noise_std>` | `walk:<step_std>` |
/// `sine:<period>:<amplitude>:<noise_std>`
fn parse_base(value: &str) -> Result<BaseProcess, String> {
    let parts: Vec<&str> = value.split(':').collect();
    let num = |s: &str| -> Result<f64, String> {
        s.parse().map_err(|_| format!("bad number '{s}'"))
    };
    match parts.as_slice() {
        ["ar1", coeff, noise] => Ok(BaseProcess::Ar1 {
            coeff: num(coeff)?,
            noise_std: num(noise)?,
        }),
        ["walk", step] => Ok(BaseProcess::RandomWalk {
            step_std: num(step)?,
        }),
        ["sine", period, amplitude, noise] => Ok(BaseProcess::SineDrift {
            period: num(period)?,
            amplitude: num(amplitude)?,
            noise_std: num(noise)?,
        }),
        _ => Err("expected ar1:<coeff>:<std>, walk:<std> or sine:<period>:<amp>:<std>".into()),
    }
}

/// Semicolon-separated `source>target:slope:intercept:noise_std` entries.
fn parse_links(value: &str) -> Result<Vec<AffineLink>, String> {
    let mut links = Vec::new();
    for entry in value.split(';').map(str::trim).filter(|e| !e.is_empty()) {
        let (endpoints, rest) = entry
            .split_once(':')
            .ok_or_else(|| format!("link '{entry}' is missing coefficients"))?;
        let (source, target) = endpoints
            .split_once('>')
            .ok_or_else(|| format!("link '{entry}' needs 'source>target'"))?;
        let parts: Vec<&str> = rest.split(':').collect();
        let [slope, intercept, noise] = parts.as_slice() else {
            return Err(format!("link '{entry}' needs slope:intercept:noise_std"));
        };
        let num = |s: &str| -> Result<f64, String> {
            s.parse().map_err(|_| format!("bad number '{s}' in link '{entry}'"))
        };
        links.push(AffineLink {
            source: source.trim().to_string(),
            target: target.trim().to_string(),
            slope: num(slope)?,
            intercept: num(intercept)?,
            noise_std: num(noise)?,
        });
    }
    Ok(links)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_apply_for_missing_keys() {
        let settings = parse_settings("error_threshold = 1.5\n").unwrap();
        assert_eq!(settings.sim.error_threshold, 1.5);
        assert_eq!(settings.sim.training_len, 100);
        assert_eq!(settings.gap_policy, GapPolicy::Interpolate { max_run: 3 });
    }

    #[test]
    fn unknown_keys_are_errors() {
        let err = parse_settings("error_treshold = 1.5\n").unwrap_err();
        assert!(matches!(err, CliError::Config(msg) if msg.contains("unknown key")));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# a comment\n\nfilter_order = 2\n  # indented comment\n";
        let settings = parse_settings(text).unwrap();
        assert_eq!(settings.sim.filter_order, 2);
    }

    #[test]
    fn invariant_violations_surface_as_config_errors() {
        let err = parse_settings("training_len = 4\nfilter_order = 4\n").unwrap_err();
        assert!(matches!(err, CliError::Config(msg) if msg.contains("T_p must exceed p")));
    }

    #[test]
    fn synth_spec_parses_completely() {
        let text = "rng_seed = 9\nsynth_nodes = 3\nsynth_len = 500\n\
                    synth_base = sine:200:4:0.1\nsynth_start = 21\n\
                    synth_links = n0>n1:2.0:1.0:0.0; n0>n2:0.5:-1.0:0.2\n";
        let settings = parse_settings(text).unwrap();
        let synth = settings.synth.unwrap();
        assert_eq!(synth.node_count, 3);
        assert_eq!(synth.length, 500);
        assert_eq!(synth.rng_seed, 9);
        assert_eq!(synth.start_value, 21.0);
        assert_eq!(synth.links.len(), 2);
        assert_eq!(synth.links[1].target, "n2");
        assert_eq!(synth.links[1].intercept, -1.0);
    }

    #[test]
    fn partial_synth_spec_is_an_error() {
        let err = parse_settings("synth_nodes = 3\n").unwrap_err();
        assert!(matches!(err, CliError::Config(msg) if msg.contains("synth")));
    }

    #[test]
    fn multiple_problems_reported_together() {
        let err = parse_settings("filter_order = x\nbogus = 1\n").unwrap_err();
        match err {
            CliError::Config(msg) => {
                assert!(msg.contains("filter_order"));
                assert!(msg.contains("bogus"));
            }
            other => panic!("wrong class: {other:?}"),
        }
    }
}
