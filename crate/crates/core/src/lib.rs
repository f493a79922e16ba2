//! Sampling and counting for repulsive finite-range Gibbs point processes.
//!
//! Modules are generic over the coordinate scalar (`f32` or `f64`, see
//! [`scalar::Real`]); estimates are always `f64`. The aliases at the crate
//! root fix the scalar to `f64`.

// Parameter checks are written `!(x > 0.0)` on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod activity;
pub mod connective;
pub mod counting;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod potential;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod scalar;
pub mod ssm;
pub mod thermo;

pub use activity::{support_separation, ActivityKind, ActivitySpec};
pub use connective::{connective_report, estimate_vk, ConnectiveReport};
pub use counting::{
    approx_log_partition, logz_sweep, series_log_partition_oracle, tonks_log_partition,
    tonks_ring_log_partition, CountingOptions, CountingReport, OracleOptions, SeriesOracle, SweepOptions,
    SweepReport,
};
pub use error::{Error, Result};
pub use estimators::{estimate_density, estimate_emptiness, estimate_kpoint_density, Estimate};
pub use rng::Streams;
pub use sampler::{run_chain, DEFAULT_MIXING_CONSTANT, REJECTION_LIMIT};
pub use scalar::Real;
pub use ssm::{boundary_gap, decay_profile, recursion_residual, RecursionCheck, RecursionOptions, SSMDecayFit};
pub use thermo::{
    estimate_pressure, pressure_via_interpolation, surface_pressure_box, surface_pressure_harness,
    surface_pressure_interpolation, tonks_pressure_oracle, torus_pressure_gap, MeshParams, Method,
    SurfacePressureHarness, ThermoConstants, ThermoOptions, ThermoResult, TorusGap,
};

pub type Point = geometry::Point<f64>;
pub type Region = geometry::Region<f64>;
pub type CellIndex = geometry::CellIndex<f64>;
pub type PairPotential = potential::PairPotential<f64>;
pub type ActivityFunction = activity::ActivityFunction<f64>;
pub type GibbsModel = sampler::GibbsModel<f64>;
pub type BlockDynamicsConfig = sampler::BlockDynamicsConfig<f64>;
pub type ChainState = sampler::ChainState<f64>;
pub type DensityRequest = estimators::DensityRequest<f64>;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
