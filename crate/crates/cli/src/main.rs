use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gibbs_cli::config::{finalize, parse_raw, AlgorithmConfig, ModelConfig, PotentialConfig, RegionConfig};
use gibbs_cli::{execute, render_config, write_atomic, Command, ConfigError, Outcome, RunConfig};
use gibbs_core::activity::ActivitySpec;

/// Sample repulsive Gibbs point processes and estimate their partition
/// functions, densities, pressure and surface pressure.
#[derive(Parser, Debug)]
#[command(name = "gibbs", version, allow_negative_numbers = true)]
struct Cli {
    /// sample | logz | logz-oracle | pressure | surface-pressure | connective | ssm-test | torus-gap
    command: Option<String>,
    /// TOML run configuration; shorthand flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Report path (JSON); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    /// hard-sphere | strauss | ideal
    #[arg(long)]
    potential: Option<String>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long = "A")]
    a: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
    /// Cube `[0, side]^d` (a torus with `--torus`); the torus side of `torus-gap`.
    #[arg(long)]
    side: Option<f64>,
    #[arg(long)]
    torus: bool,
    /// Print the resolved configuration instead of running it.
    #[arg(long)]
    print_config: bool,
}

fn fail_config(errors: &[ConfigError]) -> ExitCode {
    for e in errors {
        eprintln!("config error: {e}");
    }
    ExitCode::from(Outcome::ConfigError as u8)
}

fn resolve(cli: &Cli) -> Result<RunConfig, Vec<ConfigError>> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                vec![ConfigError {
                    field: "--config".into(),
                    message: format!("cannot read {}: {e}", path.display()),
                }]
            })?;
            parse_raw(&text, path.parent())?
        }
        None => {
            let missing = |name: &str| ConfigError {
                field: format!("--{name}"),
                message: "required without --config".into(),
            };
            let mut errors = Vec::new();
            if cli.command.is_none() {
                errors.push(missing("command"));
            }
            if cli.dim.is_none() {
                errors.push(missing("dim"));
            }
            if cli.potential.is_none() {
                errors.push(missing("potential"));
            }
            if cli.lambda.is_none() {
                errors.push(missing("lambda"));
            }
            if !errors.is_empty() {
                return Err(errors);
            }
            RunConfig {
                command: Command::Pressure,
                seed: gibbs_cli::config::DEFAULT_SEED,
                threads: None,
                output: None,
                model: ModelConfig {
                    dim: 1,
                    potential: PotentialConfig {
                        kind: String::new(),
                        r: None,
                        a: None,
                        file: None,
                        steps: None,
                    },
                    activity: ActivitySpec::constant(1.0),
                    region: None,
                },
                algorithm: AlgorithmConfig::default(),
            }
        }
    };
    if let Some(name) = &cli.command {
        config.command = Command::parse(name).ok_or_else(|| {
            vec![ConfigError {
                field: "command".into(),
                message: format!("unknown command `{name}`"),
            }]
        })?;
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if cli.threads.is_some() {
        config.threads = cli.threads;
    }
    if cli.out.is_some() {
        config.output = cli.out.clone();
    }
    if let Some(d) = cli.dim {
        config.model.dim = d;
    }
    if let Some(p) = &cli.potential {
        config.model.potential.kind = p.clone();
    }
    if cli.r.is_some() {
        config.model.potential.r = cli.r;
    }
    if cli.a.is_some() {
        config.model.potential.a = cli.a;
    }
    if let Some(l) = cli.lambda {
        config.model.activity.lambda = l;
    }
    if cli.epsilon.is_some() {
        config.algorithm.epsilon = cli.epsilon;
    }
    if cli.l.is_some() {
        config.algorithm.l = cli.l;
    }
    if let Some(side) = cli.side {
        if config.command == Command::TorusGap {
            config.algorithm.sides = Some(vec![side]);
        } else {
            config.model.region = Some(RegionConfig {
                kind: if cli.torus { "torus" } else { "cube" }.into(),
                lo: None,
                hi: None,
                side: Some(side),
            });
        }
    }
    finalize(config)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(Outcome::ConfigError as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let config = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => return fail_config(&e),
    };
    if cli.print_config {
        print!("{}", render_config(&config));
        return ExitCode::SUCCESS;
    }
    let (report, outcome) = execute(&config);
    let json = report.to_json();
    match &config.output {
        Some(path) => {
            if let Err(e) = write_atomic(path, json.as_bytes()) {
                eprintln!("cannot write report {}: {e}", path.display());
                return ExitCode::from(Outcome::EstimatorFailure as u8);
            }
        }
        None => print!("{json}"),
    }
    if let Some(err) = &report.error {
        eprintln!("{}: {}", err.kind, err.message);
    }
    ExitCode::from(outcome as u8)
}
