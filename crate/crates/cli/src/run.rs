//! Command dispatch.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use gibbs_core::connective::connective_report;
use gibbs_core::counting::{
    approx_log_partition, logz_sweep, series_log_partition_oracle_with, tonks_log_partition,
    tonks_ring_log_partition, CountingOptions, OracleOptions, SweepOptions,
};
use gibbs_core::estimators::{repetitions_for, DensityRequest, Estimate};
use gibbs_core::geometry::{Point, Region};
use gibbs_core::potential::PairPotential;
use gibbs_core::rng::Streams;
use gibbs_core::sampler::{par_chains, run_chain, write_configurations_csv, BlockDynamicsConfig};
use gibbs_core::ssm::{decay_profile, recursion_residual, RecursionOptions};
use gibbs_core::thermo::{
    estimate_pressure, pressure_via_interpolation, surface_pressure_harness, tonks_pressure_oracle,
    torus_pressure_gap, ThermoOptions,
};
use gibbs_core::Error;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::report::{Constants, ErrorReport, Metadata, RngAccounting, RunReport};

/// Process exit status of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success = 0,
    ConfigError = 1,
    EstimatorFailure = 2,
    OracleTolerance = 3,
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

struct Output {
    results: Value,
    headline: Option<Estimate>,
    constants: Constants,
    streams: Vec<String>,
}

impl Output {
    fn new(results: Value) -> Self {
        Output {
            results,
            headline: None,
            constants: Constants::default(),
            streams: Vec::new(),
        }
    }
}

/// Runs the configured command on a pool of `threads` workers.
pub fn execute(config: &RunConfig) -> (RunReport, Outcome) {
    let threads = config.threads.unwrap_or_else(rayon::current_num_threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    let started = unix_now();
    let clock = Instant::now();
    let result = pool.install(|| dispatch(config));
    let mut report = RunReport {
        command: config.command.to_string(),
        params: config.clone(),
        estimate: None,
        std_error: None,
        n_samples: None,
        chain_steps: None,
        seed: config.seed,
        wall_time_s: 0.0,
        constants: Constants::default(),
        results: Value::Null,
        error: None,
        versions: BTreeMap::from([
            ("gibbs-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
            ("gibbs-core".to_string(), gibbs_core::VERSION.to_string()),
        ]),
        rng: RngAccounting {
            generator: "ChaCha8, one stream per (seed, purpose path, chain index)".into(),
            master_seed: config.seed,
            streams: Vec::new(),
        },
        metadata: Metadata {
            started_unix_s: started,
            finished_unix_s: 0.0,
            threads,
        },
    };
    let outcome = match result {
        Ok(out) => {
            if let Some(h) = &out.headline {
                report.set_headline(h);
            }
            report.constants = out.constants;
            report.results = out.results;
            report.rng.streams = out.streams;
            Outcome::Success
        }
        Err(e) => {
            let outcome = match e {
                Error::OracleTolerance { .. } => Outcome::OracleTolerance,
                _ => Outcome::EstimatorFailure,
            };
            report.error = Some(ErrorReport {
                kind: format!("{e:?}").split([' ', '(', '{']).next().unwrap_or("Error").to_string(),
                message: e.to_string(),
            });
            outcome
        }
    };
    report.wall_time_s = clock.elapsed().as_secs_f64();
    report.metadata.finished_unix_s = unix_now();
    (report, outcome)
}

fn dispatch(config: &RunConfig) -> Result<Output, Error> {
    let streams = Streams::new(config.seed);
    match config.command {
        Command::Sample => sample(config, &streams),
        Command::Logz => logz(config, &streams),
        Command::LogzOracle => logz_oracle(config),
        Command::Pressure => pressure(config, &streams),
        Command::SurfacePressure => surface_pressure(config, &streams),
        Command::Connective => connective(config, &streams),
        Command::SsmTest => ssm_test(config, &streams),
        Command::TorusGap => torus_gap(config, &streams),
    }
}

fn potential(config: &RunConfig) -> Result<Arc<PairPotential<f64>>, Error> {
    config
        .potential()
        .map(Arc::new)
        .map_err(|e| Error::InvalidPotential(e[0].to_string()))
}

fn thermo_options(config: &RunConfig) -> ThermoOptions {
    let a = &config.algorithm;
    let d = ThermoOptions::default();
    ThermoOptions {
        epsilon: config.epsilon(),
        mixing_constant: config.mixing_constant(),
        radius: a.l,
        window: a.window,
        window_constant: a.window_constant,
        decay_rate: a.decay_rate,
        mesh_constant: a.c_mesh.unwrap_or(d.mesh_constant),
        mesh_width: a.mesh_width,
        mesh_nodes: a.mesh_nodes,
        repetitions: a.repetitions,
        gauss_nodes: a.gauss_nodes.unwrap_or(d.gauss_nodes),
        face_intervals: a.intervals.unwrap_or(d.face_intervals),
        ..d
    }
}

fn chain_constants(config: &RunConfig, cfg: &BlockDynamicsConfig<f64>) -> Constants {
    Constants {
        l: Some(cfg.radius),
        c_mix: Some(config.mixing_constant()),
        c: None,
        window: None,
    }
}

/// Hard rods in one dimension have closed-form oracles.
fn hard_rods(config: &RunConfig) -> Option<f64> {
    match config.potential() {
        Ok(PairPotential::HardSphere { range }) if config.model.dim == 1 => Some(range),
        _ => None,
    }
}

fn constant_activity(config: &RunConfig) -> bool {
    let a = &config.model.activity;
    a.kind == gibbs_core::ActivityKind::Constant && a.tilt_points.is_empty()
}

fn sample(config: &RunConfig, streams: &Streams) -> Result<Output, Error> {
    let model = config.model()?;
    let mut cfg = BlockDynamicsConfig::for_model(&model, config.algorithm.l, config.mixing_constant(), config.epsilon())?;
    if let Some(t) = config.algorithm.steps {
        cfg.steps = t;
    }
    let n = config.algorithm.repetitions.unwrap_or(1);
    let start = Instant::now();
    let chains = par_chains(n, &streams.fork(0), |rng| Ok(run_chain(&model, &cfg, rng)?.points()))?;
    let counts: Vec<f64> = chains.iter().map(|c| c.len() as f64).collect();
    let mean_points = Estimate::from_samples(&counts, cfg.steps, config.seed, start.elapsed().as_secs_f64());
    let csv = config
        .algorithm
        .csv
        .clone()
        .or_else(|| config.output.as_ref().map(|o| o.with_extension("csv")));
    if let Some(path) = &csv {
        let mut buf = Vec::new();
        write_configurations_csv(&mut buf, model.dim(), &chains).map_err(|e| Error::param("csv", e.to_string()))?;
        crate::report::write_atomic(path, &buf).map_err(|e| Error::param("csv", format!("{}: {e}", path.display())))?;
    }
    let mut out = Output::new(json!({
        "chains": n,
        "steps": cfg.steps,
        "mean_points": mean_points,
        "csv": csv,
    }));
    out.headline = Some(mean_points);
    out.constants = chain_constants(config, &cfg);
    out.streams = vec![format!("chains: fork(0), chain 0..{n}")];
    Ok(out)
}

fn exact_log_z(config: &RunConfig) -> Option<f64> {
    if !constant_activity(config) {
        return None;
    }
    let lambda = config.model.activity.lambda;
    let region = config.region()?;
    if config.model.potential.kind == "ideal" {
        return region.volume().ok().map(|v| lambda * v);
    }
    let r = hard_rods(config)?;
    match region {
        Region::Torus { side, .. } => Some(tonks_ring_log_partition(side, r, lambda)),
        Region::Box { lo, hi } => Some(tonks_log_partition(hi[0] - lo[0], r, lambda)),
        _ => None,
    }
}

fn logz(config: &RunConfig, streams: &Streams) -> Result<Output, Error> {
    let model = config.model()?;
    let method = config.algorithm.method.as_deref().unwrap_or("telescoping");
    let exact = exact_log_z(config);
    let (log_z, mut out) = if method == "sweep" {
        let d = SweepOptions::default();
        let opts = SweepOptions {
            intervals: config.algorithm.intervals.unwrap_or(d.intervals),
            repetitions: config.algorithm.repetitions.unwrap_or(d.repetitions),
            epsilon: config.epsilon(),
            mixing_constant: config.mixing_constant(),
            radius: config.algorithm.l,
        };
        let rep = logz_sweep(&model, &opts, &streams.fork(1))?;
        let mut o = Output::new(json!({ "method": "sweep", "sweep": rep, "exact": exact }));
        o.streams = vec!["sweep nodes: fork(1).fork(node), chain 0..N".into()];
        (rep.log_z, o)
    } else {
        let d = CountingOptions::default();
        let opts = CountingOptions {
            sample_constant: config.algorithm.sample_constant.unwrap_or(d.sample_constant),
            mixing_constant: config.mixing_constant(),
            radius: config.algorithm.l,
        };
        let rep = approx_log_partition(&model, config.epsilon(), &opts, &streams.fork(1))?;
        let mut o = Output::new(json!({ "method": "telescoping", "counting": rep, "exact": exact }));
        o.streams = vec!["emptiness factors: fork(1).fork(cell), chain 0..T".into()];
        (rep.log_z, o)
    };
    out.constants = Constants {
        l: Some(config.algorithm.l.unwrap_or(2.0 * model.potential().range())),
        c_mix: Some(config.mixing_constant()),
        c: None,
        window: None,
    };
    out.headline = Some(log_z);
    Ok(out)
}

fn logz_oracle(config: &RunConfig) -> Result<Output, Error> {
    let model = config.model()?;
    let tol = config.algorithm.tolerance.unwrap_or(1e-3);
    let oracle = series_log_partition_oracle_with(&model, tol, &OracleOptions::default())?;
    let mut out = Output::new(json!({ "oracle": oracle, "tolerance": tol, "exact": exact_log_z(config) }));
    out.headline = Some(Estimate {
        value: oracle.log_z,
        std_error: oracle.error,
        n_samples: oracle.nodes_per_order,
        chain_steps: 0,
        seed: config.seed,
        wall_time_s: 0.0,
    });
    out.streams = vec!["quasi-random shifts: fixed per-order seeds (independent of the master seed)".into()];
    Ok(out)
}

fn pressure(config: &RunConfig, streams: &Streams) -> Result<Output, Error> {
    let pot = potential(config)?;
    let opts = thermo_options(config);
    let lambda = config.model.activity.lambda;
    let dim = config.model.dim;
    let method = config.algorithm.method.as_deref().unwrap_or("single-density");
    let mut results = Vec::new();
    let mut streams_used = Vec::new();
    if method == "single-density" || method == "both" {
        results.push(estimate_pressure(&pot, dim, lambda, &opts, &streams.fork(1))?);
        streams_used.push("single-density: fork(1), chain 0..N".to_string());
    }
    if method == "interpolation" || method == "both" {
        results.push(pressure_via_interpolation(&pot, dim, lambda, &opts, &streams.fork(2))?);
        streams_used.push("interpolation: fork(2).fork(node), chain 0..N".to_string());
    }
    let exact = hard_rods(config).map(|r| tonks_pressure_oracle(lambda, r));
    let agreement = (results.len() == 2).then(|| results[0].estimate.z_distance(&results[1].estimate));
    let mut out = Output::new(json!({
        "results": results,
        "exact": exact,
        "z_distance": agreement,
    }));
    out.headline = Some(results[0].estimate.clone());
    out.constants = (&results[0].constants).into();
    out.streams = streams_used;
    Ok(out)
}

fn surface_pressure(config: &RunConfig, streams: &Streams) -> Result<Output, Error> {
    let pot = potential(config)?;
    let opts = thermo_options(config);
    let h = surface_pressure_harness(&pot, config.model.dim, config.model.activity.lambda, &opts, streams)?;
    let mut out = Output::new(json!({ "harness": h }));
    out.headline = Some(h.interpolation.estimate.clone());
    out.constants = (&h.interpolation.constants).into();
    out.streams = vec![
        "interpolation: fork(1).fork(node), chain 0..N".into(),
        "face integral: fork(2).fork(width), chain 0..N".into(),
        "box form: fork(3), chain 0..N".into(),
    ];
    Ok(out)
}

fn connective(config: &RunConfig, streams: &Streams) -> Result<Output, Error> {
    let pot = potential(config)?;
    let k_max = config.algorithm.k_max.unwrap_or(8);
    let samples = config.algorithm.samples.unwrap_or(100_000);
    let rep = connective_report(&*pot, config.model.dim, k_max, samples, &streams.fork(1))?;
    let mut out = Output::new(json!({ "connective": rep }));
    out.headline = rep.v.last().cloned();
    out.streams = vec![format!("walks: fork(1).fork(k), chunk 0..{}", samples.div_ceil(4096))];
    Ok(out)
}

fn ssm_test(config: &RunConfig, streams: &Streams) -> Result<Output, Error> {
    let pot = potential(config)?;
    let r = pot.range();
    let dim = config.model.dim;
    let ladder = config
        .algorithm
        .ladder
        .clone()
        .unwrap_or_else(|| (1..=4).map(|k| k as f64 * r).collect());
    let t_max = *ladder.last().expect("validated ladder");
    let region = match config.region() {
        Some(region) => region,
        None => Region::cube(dim, -(t_max + r), t_max + r)?,
    };
    let (lo, hi) = region.bounding_box().ok_or(Error::UnboundedRegion)?;
    let v = match &config.algorithm.point {
        Some(p) => Point::new(p),
        None => Point::new(&(0..dim).map(|i| (lo[i] + hi[i]) / 2.0).collect::<Vec<_>>()),
    };
    let model = config.model_on(region.clone())?;
    let lambda = model.activity().bound();
    let mut req = DensityRequest::new(model.clone(), v.clone(), config.epsilon(), config.mixing_constant(), config.algorithm.l)?
        .with_repetitions(config.algorithm.repetitions.unwrap_or_else(|| repetitions_for(lambda, config.epsilon())));
    if let Some(t) = config.algorithm.steps {
        req.chain.steps = t;
    }
    let k_needed = ((t_max - r) / r).floor().max(2.0) as usize;
    let cc = if pot.is_trivial() {
        None
    } else {
        Some(connective_report(
            &*pot,
            dim,
            config.algorithm.k_max.unwrap_or(k_needed),
            config.algorithm.samples.unwrap_or(100_000),
            &streams.fork(2),
        )?)
    };
    let profile = decay_profile(&req, &ladder, cc.as_ref(), &streams.fork(1))?;
    let volume = region.volume().unwrap_or(f64::INFINITY);
    let run_recursion = config
        .algorithm
        .recursion
        .unwrap_or(dim == 1 && volume <= 3.0 && lambda <= 1.0);
    let recursion = if run_recursion {
        Some(recursion_residual(&model, &v, &RecursionOptions::default())?)
    } else {
        None
    };
    let mut out = Output::new(json!({
        "profile": profile,
        "connective": cc,
        "recursion": recursion,
        "point": v.to_f64(),
    }));
    out.headline = profile.gaps.first().cloned();
    out.constants = chain_constants(config, &req.chain);
    out.streams = vec![
        "paired densities: fork(1), chain 0..N (shared by both activities)".into(),
        "walks: fork(2).fork(k)".into(),
    ];
    Ok(out)
}

fn torus_gap(config: &RunConfig, streams: &Streams) -> Result<Output, Error> {
    let pot = potential(config)?;
    let opts = thermo_options(config);
    let lambda = config.model.activity.lambda;
    let dim = config.model.dim;
    let sides = config.algorithm.sides.clone().unwrap_or_else(|| vec![4.0, 8.0]);
    let d = CountingOptions::default();
    let counting = CountingOptions {
        sample_constant: config.algorithm.sample_constant.unwrap_or(d.sample_constant),
        mixing_constant: config.mixing_constant(),
        radius: config.algorithm.l,
    };
    let mut gaps = Vec::new();
    for (i, &n) in sides.iter().enumerate() {
        gaps.push(torus_pressure_gap(&pot, dim, lambda, n, &opts, &counting, &streams.fork(i as u64))?);
    }
    let exact: Option<Vec<f64>> = hard_rods(config).map(|r| {
        let p = tonks_pressure_oracle(lambda, r);
        sides.iter().map(|&n| tonks_ring_log_partition(n, r, lambda) - n * p).collect()
    });
    let mut out = Output::new(json!({ "sides": sides, "gaps": gaps, "exact": exact }));
    out.headline = gaps.first().map(|g| g.gap.clone());
    out.constants = gaps.first().map(|g| (&g.pressure.constants).into()).unwrap_or_default();
    out.streams = vec!["side i: fork(i).fork(1) counting, fork(i).fork(2) pressure".into()];
    Ok(out)
}
