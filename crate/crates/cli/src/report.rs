//! Machine-readable run reports.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use gibbs_core::estimators::Estimate;
use gibbs_core::thermo::ThermoConstants;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;

pub const SCHEMA: &str = include_str!("../schema/report.schema.json");

/// Constants the headline estimate depended on.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    #[serde(rename = "L")]
    pub l: Option<f64>,
    #[serde(rename = "C")]
    pub c_mix: Option<f64>,
    pub c: Option<f64>,
    pub window: Option<f64>,
}

impl From<&ThermoConstants> for Constants {
    fn from(t: &ThermoConstants) -> Self {
        Constants {
            l: Some(t.update_radius),
            c_mix: Some(t.mixing_constant),
            c: t.c,
            window: Some(t.window),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
}

/// Which random streams a run consumed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RngAccounting {
    pub generator: String,
    pub master_seed: u64,
    /// Stream forks in the order they were taken, as `purpose: tag path`.
    pub streams: Vec<String>,
}

/// Fields that legitimately differ between identical runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// Echo of the validated configuration.
    pub params: RunConfig,
    pub estimate: Option<f64>,
    pub std_error: Option<f64>,
    pub n_samples: Option<u64>,
    pub chain_steps: Option<u64>,
    pub seed: u64,
    pub wall_time_s: f64,
    pub constants: Constants,
    /// Command-specific results.
    pub results: Value,
    pub error: Option<ErrorReport>,
    pub versions: BTreeMap<String, String>,
    pub rng: RngAccounting,
    pub metadata: Metadata,
}

impl RunReport {
    pub fn set_headline(&mut self, e: &Estimate) {
        self.estimate = Some(e.value);
        self.std_error = Some(e.std_error);
        self.n_samples = Some(e.n_samples);
        self.chain_steps = Some(e.chain_steps);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// The report with run-dependent fields removed: `metadata`, the requested
/// thread count and every `wall_time_s`. Two runs with the same seed agree
/// on this exactly, whatever the thread count.
pub fn comparable(report: &Value) -> Value {
    fn strip(v: &mut Value) {
        match v {
            Value::Object(map) => {
                map.remove("wall_time_s");
                map.remove("metadata");
                map.values_mut().for_each(strip);
            }
            Value::Array(items) => items.iter_mut().for_each(strip),
            _ => {}
        }
    }
    let mut out = report.clone();
    strip(&mut out);
    if let Some(params) = out.get_mut("params").and_then(Value::as_object_mut) {
        params.remove("threads");
    }
    out
}
