//! Run configuration: TOML parsing, validation with every error collected,
//! and construction of the core model objects.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use gibbs_core::activity::ActivitySpec;
use gibbs_core::geometry::{Point, Region};
use gibbs_core::potential::PairPotential;
use gibbs_core::sampler::{GibbsModel, DEFAULT_MIXING_CONSTANT};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_EPSILON: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sample,
    Logz,
    LogzOracle,
    Pressure,
    SurfacePressure,
    Connective,
    SsmTest,
    TorusGap,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Sample,
        Command::Logz,
        Command::LogzOracle,
        Command::Pressure,
        Command::SurfacePressure,
        Command::Connective,
        Command::SsmTest,
        Command::TorusGap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Logz => "logz",
            Command::LogzOracle => "logz-oracle",
            Command::Pressure => "pressure",
            Command::SurfacePressure => "surface-pressure",
            Command::Connective => "connective",
            Command::SsmTest => "ssm-test",
            Command::TorusGap => "torus-gap",
        }
    }

    pub fn parse(name: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Whether the command runs on the configured finite region.
    pub fn needs_region(self) -> bool {
        matches!(self, Command::Sample | Command::Logz | Command::LogzOracle)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub model: ModelConfig,
    #[serde(default)]
    pub algorithm: AlgorithmConfig,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub dim: usize,
    pub potential: PotentialConfig,
    pub activity: ActivitySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionConfig>,
}

/// `kind` is one of `hard-sphere` (`r`), `strauss` (`r`, `A`), `ideal`,
/// or `tabulated` (`file` or inline `steps = [[radius, value], ...]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<[f64; 2]>>,
}

/// `kind` is `box` (`lo`, `hi`), `cube` (`side`, anchored at the origin)
/// or `torus` (`side`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<f64>,
}

/// Algorithm knobs; absent values take the estimator defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Update radius.
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    /// Mixing constant.
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c_mix: Option<f64>,
    /// Mesh constant.
    #[serde(rename = "c", default, skip_serializing_if = "Option::is_none")]
    pub c_mesh: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_rate: Option<f64>,
    #[serde(rename = "h", default, skip_serializing_if = "Option::is_none")]
    pub mesh_width: Option<f64>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub mesh_nodes: Option<usize>,
    /// Chains per density (or per quadrature node).
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub repetitions: Option<usize>,
    /// Block updates per chain (`sample` and `ssm-test`).
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_constant: Option<f64>,
    /// `logz`: `telescoping` or `sweep`; `pressure`: `single-density`,
    /// `interpolation` or `both`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauss_nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    /// Walks per `V_k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    /// Torus sides of `torus-gap`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sides: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recursion: Option<bool>,
    /// Configuration dump of `sample`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

/// One validation failure, naming the offending field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Deserialises without validating; relative tabulated-potential paths
/// resolve against `base`.
pub fn parse_raw(text: &str, base: Option<&Path>) -> Result<RunConfig, Vec<ConfigError>> {
    let mut config: RunConfig =
        toml::from_str(text).map_err(|e| vec![ConfigError::new("config", e.message().to_string())])?;
    if let Some(base) = base {
        if let Some(file) = &config.model.potential.file {
            if file.is_relative() {
                config.model.potential.file = Some(base.join(file));
            }
        }
    }
    Ok(config)
}

/// Validates and fills defaults (`seed = 42`, `epsilon`, `L = 2r`, `C = 10`).
pub fn finalize(mut config: RunConfig) -> Result<RunConfig, Vec<ConfigError>> {
    let errors = validate(&config);
    if !errors.is_empty() {
        return Err(errors);
    }
    fill_defaults(&mut config);
    Ok(config)
}

pub fn parse_config_at(text: &str, base: Option<&Path>) -> Result<RunConfig, Vec<ConfigError>> {
    finalize(parse_raw(text, base)?)
}

pub fn parse_config(text: &str) -> Result<RunConfig, Vec<ConfigError>> {
    parse_config_at(text, None)
}

pub fn render_config(config: &RunConfig) -> String {
    toml::to_string(config).expect("configurations serialise")
}

fn fill_defaults(config: &mut RunConfig) {
    let range = config.potential().map(|p| p.range()).unwrap_or(1.0);
    let a = &mut config.algorithm;
    a.epsilon.get_or_insert(DEFAULT_EPSILON);
    a.c_mix.get_or_insert(DEFAULT_MIXING_CONSTANT);
    a.l.get_or_insert(2.0 * range);
}

fn positive(errors: &mut Vec<ConfigError>, field: &str, value: Option<f64>) {
    if let Some(v) = value {
        if !(v > 0.0 && v.is_finite()) {
            errors.push(ConfigError::new(field, format!("must be positive and finite, got {v}")));
        }
    }
}

fn nonzero(errors: &mut Vec<ConfigError>, field: &str, value: Option<usize>) {
    if value == Some(0) {
        errors.push(ConfigError::new(field, "must be at least 1"));
    }
}

/// Every problem with the configuration.
pub fn validate(config: &RunConfig) -> Vec<ConfigError> {
    let mut errors = Vec::new();
    let dim = config.model.dim;
    if dim == 0 {
        errors.push(ConfigError::new("model.dim", "must be at least 1"));
    }
    if config.threads == Some(0) {
        errors.push(ConfigError::new("threads", "must be at least 1"));
    }
    let potential = match config.potential() {
        Ok(p) => Some(p),
        Err(mut e) => {
            errors.append(&mut e);
            None
        }
    };
    let act = &config.model.activity;
    if !(act.lambda > 0.0 && act.lambda.is_finite()) {
        errors.push(ConfigError::new(
            "model.activity.lambda",
            format!("must be positive and finite, got {}", act.lambda),
        ));
    }
    for (name, v) in [("direction", &act.direction), ("second_direction", &act.second_direction)] {
        if !v.is_empty() && v.len() != dim {
            errors.push(ConfigError::new(
                format!("model.activity.{name}"),
                format!("has {} components but model.dim = {dim}", v.len()),
            ));
        }
    }
    for (i, p) in act.tilt_points.iter().enumerate() {
        if p.len() != dim {
            errors.push(ConfigError::new(
                format!("model.activity.tilt_points[{i}]"),
                format!("has {} components but model.dim = {dim}", p.len()),
            ));
        }
    }
    match &config.model.region {
        Some(region) => {
            if let Err(mut e) = region_errors(region, dim) {
                errors.append(&mut e);
            }
        }
        None if config.command.needs_region() => errors.push(ConfigError::new(
            "model.region",
            format!("required by `{}`", config.command),
        )),
        None => {}
    }
    let a = &config.algorithm;
    if let Some(eps) = a.epsilon {
        if !(eps > 0.0 && eps < 1.0) {
            errors.push(ConfigError::new("algorithm.epsilon", format!("must lie in (0, 1), got {eps}")));
        }
    }
    for (field, value) in [
        ("algorithm.L", a.l),
        ("algorithm.C", a.c_mix),
        ("algorithm.c", a.c_mesh),
        ("algorithm.window", a.window),
        ("algorithm.window_constant", a.window_constant),
        ("algorithm.decay_rate", a.decay_rate),
        ("algorithm.h", a.mesh_width),
        ("algorithm.sample_constant", a.sample_constant),
        ("algorithm.tolerance", a.tolerance),
    ] {
        positive(&mut errors, field, value);
    }
    for (field, value) in [
        ("algorithm.M", a.mesh_nodes),
        ("algorithm.N", a.repetitions),
        ("algorithm.intervals", a.intervals),
        ("algorithm.gauss_nodes", a.gauss_nodes),
        ("algorithm.samples", a.samples),
    ] {
        nonzero(&mut errors, field, value);
    }
    if a.steps == Some(0) {
        errors.push(ConfigError::new("algorithm.T", "must be at least 1"));
    }
    if let (Some(l), Some(p)) = (a.l, &potential) {
        if !p.is_trivial() && l < p.range() {
            errors.push(ConfigError::new(
                "algorithm.L",
                format!("update radius {l} is below the potential range {}", p.range()),
            ));
        }
    }
    if let Some(k) = a.k_max {
        if k < 2 {
            errors.push(ConfigError::new("algorithm.k_max", "must be at least 2"));
        }
    }
    if let Some(m) = &a.method {
        let allowed: &[&str] = match config.command {
            Command::Logz => &["telescoping", "sweep"],
            Command::Pressure => &["single-density", "interpolation", "both"],
            _ => &[],
        };
        if !allowed.contains(&m.as_str()) {
            errors.push(ConfigError::new(
                "algorithm.method",
                format!("`{m}` is not a method of `{}` (expected one of {allowed:?})", config.command),
            ));
        }
    }
    if let Some(ladder) = &a.ladder {
        if ladder.len() < 4 {
            errors.push(ConfigError::new("algorithm.ladder", "needs at least four distances"));
        }
        if ladder.windows(2).any(|w| !(w[1] > w[0])) || ladder.iter().any(|t| !(*t > 0.0)) {
            errors.push(ConfigError::new("algorithm.ladder", "distances must be positive and strictly increasing"));
        }
    }
    if let Some(p) = &a.point {
        if p.len() != dim {
            errors.push(ConfigError::new(
                "algorithm.point",
                format!("has {} components but model.dim = {dim}", p.len()),
            ));
        }
    }
    if let Some(sides) = &a.sides {
        if sides.is_empty() {
            errors.push(ConfigError::new("algorithm.sides", "needs at least one side"));
        }
        for s in sides {
            positive(&mut errors, "algorithm.sides", Some(*s));
        }
    }
    errors
}

fn region_errors(region: &RegionConfig, dim: usize) -> Result<(), Vec<ConfigError>> {
    let mut errors = Vec::new();
    match region.kind.as_str() {
        "box" => match (&region.lo, &region.hi) {
            (Some(lo), Some(hi)) => {
                if lo.len() != dim || hi.len() != dim {
                    errors.push(ConfigError::new(
                        "model.region",
                        format!("lo/hi have {}/{} components but model.dim = {dim}", lo.len(), hi.len()),
                    ));
                } else if lo.iter().zip(hi).any(|(a, b)| !(b > a)) {
                    errors.push(ConfigError::new("model.region", "needs lo < hi in every coordinate"));
                }
            }
            _ => errors.push(ConfigError::new("model.region", "box needs `lo` and `hi`")),
        },
        "cube" | "torus" => positive(&mut errors, "model.region.side", region.side.or(Some(f64::NAN))),
        other => errors.push(ConfigError::new(
            "model.region.kind",
            format!("unknown region kind `{other}` (expected box, cube or torus)"),
        )),
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

impl RunConfig {
    pub fn epsilon(&self) -> f64 {
        self.algorithm.epsilon.unwrap_or(DEFAULT_EPSILON)
    }

    pub fn mixing_constant(&self) -> f64 {
        self.algorithm.c_mix.unwrap_or(DEFAULT_MIXING_CONSTANT)
    }

    pub fn potential(&self) -> Result<PairPotential<f64>, Vec<ConfigError>> {
        let p = &self.model.potential;
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| vec![ConfigError::new(format!("model.potential.{name}"), format!("required by `{}`", p.kind))])
        };
        let invalid = |field: &str, e: gibbs_core::Error| vec![ConfigError::new(field, e.to_string())];
        match p.kind.as_str() {
            "hard-sphere" => PairPotential::hard_sphere(need(p.r, "r")?).map_err(|e| invalid("model.potential.r", e)),
            "strauss" => {
                let (r, a) = (p.r, p.a);
                let mut errs = Vec::new();
                if r.is_none() {
                    errs.push(ConfigError::new("model.potential.r", "required by `strauss`"));
                }
                if a.is_none() {
                    errs.push(ConfigError::new("model.potential.A", "required by `strauss`"));
                }
                if !errs.is_empty() {
                    return Err(errs);
                }
                PairPotential::strauss(r.unwrap(), a.unwrap()).map_err(|e| invalid("model.potential", e))
            }
            "ideal" => Ok(PairPotential::ideal()),
            "tabulated" => match (&p.file, &p.steps) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(path).map_err(|e| {
                        vec![ConfigError::new(
                            "model.potential.file",
                            format!("cannot read {}: {e}", path.display()),
                        )]
                    })?;
                    PairPotential::parse_table(&text)
                        .map_err(|e| vec![ConfigError::new("model.potential.file", format!("{}: {e}", path.display()))])
                }
                (None, Some(steps)) => PairPotential::tabulated(steps.iter().map(|s| (s[0], s[1])).collect())
                    .map_err(|e| invalid("model.potential.steps", e)),
                _ => Err(vec![ConfigError::new(
                    "model.potential",
                    "tabulated needs exactly one of `file` and `steps`",
                )]),
            },
            other => Err(vec![ConfigError::new(
                "model.potential.kind",
                format!("unknown potential kind `{other}` (expected hard-sphere, strauss, ideal or tabulated)"),
            )]),
        }
    }

    pub fn region(&self) -> Option<Region<f64>> {
        let r = self.model.region.as_ref()?;
        let dim = self.model.dim;
        match r.kind.as_str() {
            "box" => Region::new_box(Point::new(r.lo.as_ref()?), Point::new(r.hi.as_ref()?)).ok(),
            "cube" => Region::cube(dim, 0.0, r.side?).ok(),
            "torus" => Region::torus(dim, r.side?).ok(),
            _ => None,
        }
    }

    /// The model on the configured region.
    pub fn model(&self) -> Result<GibbsModel<f64>, gibbs_core::Error> {
        let region = self.region().ok_or(gibbs_core::Error::UnboundedRegion)?;
        self.model_on(region)
    }

    pub fn model_on(&self, region: Region<f64>) -> Result<GibbsModel<f64>, gibbs_core::Error> {
        let potential = Arc::new(
            self.potential()
                .map_err(|e| gibbs_core::Error::InvalidPotential(e[0].to_string()))?,
        );
        let activity = self.model.activity.build(&region, &potential)?;
        GibbsModel::new(region, potential, activity)
    }
}
