//! Pressure and surface pressure from one-point densities.
//!
//! * `p = rho_{lambda 1{x_1 >= 0}}(0)` (single density at a wall);
//! * `p = int_0^1 rho_{t lambda}(0) / t dt` (interpolation from zero);
//! * `sp = 1/d sum_j int_0^inf int_0^1 (rho_{t lambda_{e_j}}(s e_j) - rho_{t lambda}(0)) / t dt ds`;
//! * the box form `(1 - 1/d) int_0^inf (rho_{quadrant}(t e_2) - rho_{half}(0)) dt`
//!   and the slab face integral `J = int_0^inf (rho_{slab t}(0) - rho_{half}(0)) dt`,
//!   which the box form assumes to vanish.
//!
//! Infinite-volume densities are approximated on windows of half-width
//! `s = C_1 log(1/eps)`. Densities at many mesh nodes of one window are read
//! off the same chain, so node estimates are correlated and every variance
//! below is computed from per-chain sums.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::activity::ActivityFunction;
use crate::counting::{approx_log_partition, CountingOptions, CountingReport};
use crate::error::{Error, Result};
use crate::estimators::{added_energy, mean_and_se, repetitions_for, Estimate};
use crate::geometry::{Point, Region};
use crate::potential::PairPotential;
use crate::quadrature::gauss_legendre_unit;
use crate::rng::Streams;
use crate::sampler::{run_chain, BlockDynamicsConfig, GibbsModel, DEFAULT_MIXING_CONSTANT};
use crate::scalar::{exp_neg, Real};

/// Tuning constants shared by the thermodynamic estimators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThermoOptions {
    /// Additive accuracy target.
    pub epsilon: f64,
    /// Mixing constant `C` of every chain.
    pub mixing_constant: f64,
    /// Update radius `L`; `2r` when absent.
    pub radius: Option<f64>,
    /// Window half-width `s`; overrides `window_constant`.
    pub window: Option<f64>,
    /// `C_1` in `s = C_1 log(1/eps)`; overrides `decay_rate`.
    pub window_constant: Option<f64>,
    /// Fitted decay rate `b`; gives `C_1 = 8 / b`. Without it `C_1 = 2r`.
    pub decay_rate: Option<f64>,
    /// `c` in the mesh width `h = c eps / log^{d-1}(1/eps)`.
    pub mesh_constant: f64,
    pub mesh_width: Option<f64>,
    pub mesh_nodes: Option<usize>,
    /// Chains per density (or per quadrature node); derived when absent.
    pub repetitions: Option<usize>,
    /// Gauss-Legendre nodes in the interpolation variable.
    pub gauss_nodes: usize,
    /// Pilot chains used to size variance-driven budgets.
    pub pilot: usize,
    /// Intervals of the slab-width quadrature of the face integral.
    pub face_intervals: usize,
}

impl Default for ThermoOptions {
    fn default() -> Self {
        ThermoOptions {
            epsilon: 0.02,
            mixing_constant: DEFAULT_MIXING_CONSTANT,
            radius: None,
            window: None,
            window_constant: None,
            decay_rate: None,
            mesh_constant: 1.0,
            mesh_width: None,
            mesh_nodes: None,
            repetitions: None,
            gauss_nodes: 16,
            pilot: 64,
            face_intervals: 32,
        }
    }
}

impl ThermoOptions {
    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::param("epsilon", "must lie in (0, 1)"));
        }
        if self.gauss_nodes == 0 {
            return Err(Error::param("gauss_nodes", "need at least one node"));
        }
        if let Some(b) = self.decay_rate {
            if !(b > 0.0) {
                return Err(Error::param("decay_rate", "must be positive"));
            }
        }
        Ok(())
    }

    fn log_inv_eps(&self) -> f64 {
        (1.0 / self.epsilon).ln()
    }

    /// `C_1`: explicit, `8 / b`, or `2r`.
    pub fn window_constant_for(&self, range: f64) -> f64 {
        self.window_constant
            .or(self.decay_rate.map(|b| 8.0 / b))
            .unwrap_or(2.0 * range)
    }

    /// Window half-width `s = C_1 log(1/eps)`.
    pub fn window_for(&self, range: f64) -> f64 {
        self.window
            .unwrap_or_else(|| self.window_constant_for(range) * self.log_inv_eps())
    }

    /// Mesh `h = c eps / log^{d-1}(1/eps)` with `M` nodes covering `span`.
    pub fn mesh_for(&self, dim: usize, span: f64) -> MeshParams {
        let l = self.log_inv_eps().max(1.0);
        let h = self
            .mesh_width
            .unwrap_or(self.mesh_constant * self.epsilon / l.powi(dim as i32 - 1));
        let m = self.mesh_nodes.unwrap_or(((span / h).ceil() as usize).max(1));
        MeshParams {
            h,
            m,
            c: h * l.powi(dim as i32 - 1) / self.epsilon,
            big_c: m as f64 * self.epsilon / l.powi(dim as i32),
        }
    }
}

/// Mesh `t_j = j h`, `j = 0..=M`, and the constants `c`, `C` it corresponds
/// to in `h = c eps / log^{d-1}(1/eps)`, `M = C eps^{-1} log^d(1/eps)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshParams {
    pub h: f64,
    pub m: usize,
    pub c: f64,
    pub big_c: f64,
}

impl MeshParams {
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.m).map(move |j| j as f64 * self.h)
    }

    /// Trapezoid weights on the nodes.
    pub fn weights(&self) -> Vec<f64> {
        (0..=self.m)
            .map(|j| if j == 0 || j == self.m { self.h / 2.0 } else { self.h })
            .collect()
    }

    pub fn span(&self) -> f64 {
        self.h * self.m as f64
    }
}

/// How a thermodynamic quantity was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SingleDensity,
    Interpolation,
    MeshBox,
    SlabFace,
}

/// Every constant a thermodynamic estimate depended on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermoConstants {
    #[serde(rename = "L")]
    pub update_radius: f64,
    #[serde(rename = "C")]
    pub mixing_constant: f64,
    /// Mesh constant `c` (`null` when no mesh was used).
    pub c: Option<f64>,
    /// Window half-width `s`.
    pub window: f64,
    pub window_constant: f64,
    pub mesh: Option<MeshParams>,
    pub gauss_nodes: Option<usize>,
    /// Chains per density or per quadrature node.
    pub repetitions: usize,
    pub chain_steps: u64,
}

/// A pressure-type estimate with its method tag and constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermoResult {
    pub estimate: Estimate,
    pub method: Method,
    pub constants: ThermoConstants,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::param("lambda", "must be positive and finite"));
    }
    Ok(())
}

fn boxed<T: Real>(lo: &[f64], hi: &[f64]) -> Result<Region<T>> {
    Region::new_box(Point::from_f64(lo), Point::from_f64(hi))
}

fn model_on<T: Real>(
    geometry: Region<T>,
    potential: &Arc<PairPotential<T>>,
    lambda: f64,
    t: f64,
) -> Result<GibbsModel<T>> {
    let activity = ActivityFunction::constant_on(geometry.clone(), T::of(lambda))?.scaled(T::of(t))?;
    GibbsModel::new(geometry, Arc::clone(potential), activity)
}

fn chain_for<T: Real>(model: &GibbsModel<T>, options: &ThermoOptions) -> Result<BlockDynamicsConfig<T>> {
    BlockDynamicsConfig::for_model(
        model,
        options.radius.map(T::of),
        options.mixing_constant,
        options.epsilon,
    )
}

/// Per-chain values of `sum_j w_j e^{-H_{x_j}(X)} - (sum_j w_j) e^{-H_ref(X)}`
/// for chains `offset..offset + n`.
fn node_sums<T: Real>(
    model: &GibbsModel<T>,
    cfg: &BlockDynamicsConfig<T>,
    nodes: &[(Point<T>, f64)],
    reference: Option<&Point<T>>,
    offset: usize,
    n: usize,
    streams: &Streams,
) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    let pot = model.potential();
    let total_w: f64 = nodes.iter().map(|(_, w)| w).sum();
    (offset as u64..(offset + n) as u64)
        .into_par_iter()
        .map(|i| {
            let state = run_chain(model, cfg, &mut streams.chain(i))?;
            let boltz = |x: &Point<T>| exp_neg(added_energy(pot, state.index(), x).f64());
            let mut s: f64 = nodes.iter().map(|(x, w)| w * boltz(x)).sum();
            if let Some(r) = reference {
                s -= total_w * boltz(r);
            }
            Ok(s)
        })
        .collect()
}

/// Runs a pilot, then tops every job up to a common chain count so that the
/// combined standard error `sqrt(sum_k a_k^2 Var_k / N)` is at most `eps/6`.
/// `jobs` maps `(offset, n)` to per-chain sums for job `k`; `a` holds the
/// outer weights.
fn pilot_sized<F>(a: &[f64], fixed: Option<usize>, pilot: usize, epsilon: f64, job: F) -> Result<(Vec<Vec<f64>>, usize)>
where
    F: Fn(usize, usize, usize) -> Result<Vec<f64>>,
{
    if let Some(n) = fixed {
        let samples = (0..a.len()).map(|k| job(k, 0, n)).collect::<Result<Vec<_>>>()?;
        return Ok((samples, n));
    }
    let pilot = pilot.max(2);
    let mut samples = (0..a.len()).map(|k| job(k, 0, pilot)).collect::<Result<Vec<_>>>()?;
    let var: f64 = samples
        .iter()
        .zip(a)
        .map(|(s, ak)| {
            let (_, se) = mean_and_se(s);
            ak * ak * se * se * s.len() as f64
        })
        .sum();
    let n = ((36.0 * var / (epsilon * epsilon)).ceil() as usize).max(pilot);
    for (k, s) in samples.iter_mut().enumerate() {
        if n > pilot {
            s.extend(job(k, pilot, n - pilot)?);
        }
    }
    Ok((samples, n))
}

/// Weighted sum `sum_k a_k mean_k` of independent jobs and its standard error.
fn combine(samples: &[Vec<f64>], a: &[f64]) -> (f64, f64) {
    let mut value = 0.0;
    let mut var = 0.0;
    for (s, ak) in samples.iter().zip(a) {
        let (m, se) = mean_and_se(s);
        value += ak * m;
        var += (ak * se).powi(2);
    }
    (value, var.sqrt())
}

/// `p(lambda)` as the density at the origin of `lambda 1{x in S}` with
/// `S = [0, s] x [-s, s]^{d-1}`, from `N = ceil(36 lambda^2 / eps^2)` chains.
pub fn estimate_pressure<T: Real>(
    potential: &Arc<PairPotential<T>>,
    dim: usize,
    lambda: f64,
    options: &ThermoOptions,
    streams: &Streams,
) -> Result<ThermoResult> {
    check_lambda(lambda)?;
    options.validate()?;
    let start = Instant::now();
    let range = potential.range().f64();
    let s = options.window_for(range);
    let mut lo = vec![-s; dim];
    lo[0] = 0.0;
    let model = model_on(boxed::<T>(&lo, &vec![s; dim])?, potential, lambda, 1.0)?;
    let cfg = chain_for(&model, options)?;
    let n = options.repetitions.unwrap_or_else(|| repetitions_for(lambda, options.epsilon));
    let origin = Point::zeros(dim);
    let samples = node_sums(&model, &cfg, &[(origin, lambda)], None, 0, n, streams)?;
    Ok(ThermoResult {
        estimate: Estimate::from_samples(&samples, cfg.steps, streams.seed(), start.elapsed().as_secs_f64()),
        method: Method::SingleDensity,
        constants: ThermoConstants {
            update_radius: cfg.radius.f64(),
            mixing_constant: options.mixing_constant,
            c: None,
            window: s,
            window_constant: options.window_constant_for(range),
            mesh: None,
            gauss_nodes: None,
            repetitions: n,
            chain_steps: cfg.steps,
        },
    })
}

/// Exact pressure of hard rods: the root of `p e^{p r} = lambda`.
pub fn tonks_pressure_oracle(lambda: f64, r: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    // g(p) = ln p + p r - ln lambda is increasing and concave; Newton from a
    // point with g <= 0 increases monotonically to the root
    let target = lambda.ln();
    let mut p = lambda * (-lambda * r).exp();
    for _ in 0..200 {
        let g = p.ln() + p * r - target;
        let step = g / (1.0 / p + r);
        p -= step;
        if step.abs() <= 1e-15 * p {
            break;
        }
    }
    p
}

/// `p(lambda) = int_0^1 rho_{t lambda}(0) / t dt` with Gauss-Legendre nodes in
/// `t` and densities on the window `[-s, s]^d`; `N = ceil(36 lambda^2 sum w^2 /
/// eps^2)` chains per node.
pub fn pressure_via_interpolation<T: Real>(
    potential: &Arc<PairPotential<T>>,
    dim: usize,
    lambda: f64,
    options: &ThermoOptions,
    streams: &Streams,
) -> Result<ThermoResult> {
    check_lambda(lambda)?;
    options.validate()?;
    let start = Instant::now();
    let range = potential.range().f64();
    let s = options.window_for(range);
    let geometry = boxed::<T>(&vec![-s; dim], &vec![s; dim])?;
    let rule = gauss_legendre_unit(options.gauss_nodes);
    let sum_w2: f64 = rule.iter().map(|(_, w)| w * w).sum();
    let n = options
        .repetitions
        .unwrap_or_else(|| ((36.0 * lambda * lambda * sum_w2 / options.epsilon.powi(2)).ceil() as usize).max(2));
    let mut samples = Vec::with_capacity(rule.len());
    let mut steps = 0;
    let mut radius = 0.0;
    for (k, &(t, _)) in rule.iter().enumerate() {
        let model = model_on(geometry.clone(), potential, lambda, t)?;
        let cfg = chain_for(&model, options)?;
        steps = cfg.steps;
        radius = cfg.radius.f64();
        samples.push(node_sums(&model, &cfg, &[(Point::zeros(dim), lambda)], None, 0, n, &streams.fork(k as u64))?);
    }
    let weights: Vec<f64> = rule.iter().map(|&(_, w)| w).collect();
    let (value, se) = combine(&samples, &weights);
    Ok(ThermoResult {
        estimate: Estimate {
            value,
            std_error: se,
            n_samples: (n * rule.len()) as u64,
            chain_steps: steps,
            seed: streams.seed(),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        method: Method::Interpolation,
        constants: ThermoConstants {
            update_radius: radius,
            mixing_constant: options.mixing_constant,
            c: None,
            window: s,
            window_constant: options.window_constant_for(range),
            mesh: None,
            gauss_nodes: Some(options.gauss_nodes),
            repetitions: n,
            chain_steps: steps,
        },
    })
}

/// Surface pressure from the interpolation identity. For each Gauss node
/// `t` one chain on `[0, S + s] x [-s, s]^{d-1}` (with `S = M h`) supplies
/// the densities at every mesh node `x_1 = t_j` and the bulk reference at
/// `x_1 = S`.
pub fn surface_pressure_interpolation<T: Real>(
    potential: &Arc<PairPotential<T>>,
    dim: usize,
    lambda: f64,
    options: &ThermoOptions,
    streams: &Streams,
) -> Result<ThermoResult> {
    check_lambda(lambda)?;
    options.validate()?;
    let start = Instant::now();
    let range = potential.range().f64();
    let s = options.window_for(range);
    let mesh = options.mesh_for(dim, s);
    let far = mesh.span();
    let mut lo = vec![-s; dim];
    let mut hi = vec![s; dim];
    lo[0] = 0.0;
    hi[0] = far + s;
    let geometry = boxed::<T>(&lo, &hi)?;
    let nodes: Vec<(Point<T>, f64)> = mesh
        .nodes()
        .zip(mesh.weights())
        .map(|(x, w)| (Point::axis(dim, 0, T::of(x)), lambda * w))
        .collect();
    let reference = Point::axis(dim, 0, T::of(far));
    let rule = gauss_legendre_unit(options.gauss_nodes);
    let weights: Vec<f64> = rule.iter().map(|&(_, w)| w).collect();
    let models = rule
        .iter()
        .map(|&(t, _)| {
            let m = model_on(geometry.clone(), potential, lambda, t)?;
            let c = chain_for(&m, options)?;
            Ok((m, c))
        })
        .collect::<Result<Vec<_>>>()?;
    let (samples, n) = pilot_sized(&weights, options.repetitions, options.pilot, options.epsilon, |k, off, n| {
        let (m, c) = &models[k];
        node_sums(m, c, &nodes, Some(&reference), off, n, &streams.fork(k as u64))
    })?;
    let (value, se) = combine(&samples, &weights);
    let cfg = &models[0].1;
    Ok(ThermoResult {
        estimate: Estimate {
            value,
            std_error: se,
            n_samples: (n * rule.len()) as u64,
            chain_steps: cfg.steps,
            seed: streams.seed(),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        method: Method::Interpolation,
        constants: ThermoConstants {
            update_radius: cfg.radius.f64(),
            mixing_constant: options.mixing_constant,
            c: Some(mesh.c),
            window: s,
            window_constant: options.window_constant_for(range),
            mesh: Some(mesh),
            gauss_nodes: Some(options.gauss_nodes),
            repetitions: n,
            chain_steps: cfg.steps,
        },
    })
}

/// Box form `(1 - 1/d) int_0^inf (rho_{quadrant}(t e_2) - rho_{half}(0)) dt`
/// for spherically symmetric potentials, `d >= 2`. One chain on
/// `[0, s] x [0, S + s] x [-s, s]^{d-2}` supplies every node `t_j e_2` and the
/// half-space reference at `S e_2`.
pub fn surface_pressure_box<T: Real>(
    potential: &Arc<PairPotential<T>>,
    dim: usize,
    lambda: f64,
    options: &ThermoOptions,
    streams: &Streams,
) -> Result<ThermoResult> {
    check_lambda(lambda)?;
    options.validate()?;
    if dim < 2 {
        return Err(Error::param("dim", "the box form needs d >= 2 (its edge sum is empty in d = 1)"));
    }
    let start = Instant::now();
    let (integral, se, n, cfg, mesh, s) = quadrant_integral(potential, dim, lambda, options, streams)?;
    let factor = 1.0 - 1.0 / dim as f64;
    let range = potential.range().f64();
    Ok(ThermoResult {
        estimate: Estimate {
            value: factor * integral,
            std_error: factor * se,
            n_samples: n as u64,
            chain_steps: cfg.steps,
            seed: streams.seed(),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        method: Method::MeshBox,
        constants: ThermoConstants {
            update_radius: cfg.radius.f64(),
            mixing_constant: options.mixing_constant,
            c: Some(mesh.c),
            window: s,
            window_constant: options.window_constant_for(range),
            mesh: Some(mesh),
            gauss_nodes: None,
            repetitions: n,
            chain_steps: cfg.steps,
        },
    })
}

#[allow(clippy::type_complexity)]
fn quadrant_integral<T: Real>(
    potential: &Arc<PairPotential<T>>,
    dim: usize,
    lambda: f64,
    options: &ThermoOptions,
    streams: &Streams,
) -> Result<(f64, f64, usize, BlockDynamicsConfig<T>, MeshParams, f64)> {
    let range = potential.range().f64();
    let s = options.window_for(range);
    let mesh = options.mesh_for(dim, s);
    let far = mesh.span();
    let mut lo = vec![-s; dim];
    let mut hi = vec![s; dim];
    lo[0] = 0.0;
    lo[1] = 0.0;
    hi[1] = far + s;
    let model = model_on(boxed::<T>(&lo, &hi)?, potential, lambda, 1.0)?;
    let cfg = chain_for(&model, options)?;
    let nodes: Vec<(Point<T>, f64)> = mesh
        .nodes()
        .zip(mesh.weights())
        .map(|(x, w)| (Point::axis(dim, 1, T::of(x)), lambda * w))
        .collect();
    let reference = Point::axis(dim, 1, T::of(far));
    let (samples, n) = pilot_sized(&[1.0], options.repetitions, options.pilot, options.epsilon, |_, off, n| {
        node_sums(&model, &cfg, &nodes, Some(&reference), off, n, streams)
    })?;
    let (value, se) = combine(&samples, &[1.0]);
    Ok((value, se, n, cfg, mesh, s))
}

/// Estimate of `J = int_0^inf (rho_{lambda 1{0 <= x_1 <= t}}(0) - rho_{lambda 1{x_1 >= 0}}(0)) dt`
/// by the trapezoid rule in `t` on `[0, s]` against the reference
/// `rho_{lambda 1{0 <= x_1 <= s}}(0)`; transverse directions are truncated to
/// `[-s, s]`.
pub fn face_integral<T: Real>(
    potential: &Arc<PairPotential<T>>,
    dim: usize,
    lambda: f64,
    options: &ThermoOptions,
    streams: &Streams,
) -> Result<Estimate> {
    check_lambda(lambda)?;
    options.validate()?;
    let start = Instant::now();
    let range = potential.range().f64();
    let s = options.window_for(range);
    let m = options.face_intervals.max(1);
    let h = s / m as f64;
    let slab = |t: f64| -> Result<GibbsModel<T>> {
        let mut lo = vec![-s; dim];
        let mut hi = vec![s; dim];
        lo[0] = 0.0;
        hi[0] = t;
        model_on(boxed::<T>(&lo, &hi)?, potential, lambda, 1.0)
    };
    // node 0 is the empty slab, whose density is exactly lambda; the last
    // node is the reference itself
    let mut jobs = Vec::new();
    let mut a = Vec::new();
    for j in 1..m {
        let model = slab(j as f64 * h)?;
        let cfg = chain_for(&model, options)?;
        jobs.push((model, cfg));
        a.push(h);
    }
    let reference = slab(s)?;
    let reference_cfg = chain_for(&reference, options)?;
    jobs.push((reference, reference_cfg));
    // the reference is subtracted at nodes 0..m-1, total weight s - h/2
    a.push(-(s - h / 2.0));
    let origin = Point::zeros(dim);
    let run = |k: usize, off: usize, n: usize| {
        let (model, cfg) = &jobs[k];
        node_sums(model, cfg, &[(origin.clone(), lambda)], None, off, n, &streams.fork(k as u64))
    };
    // node and reference budgets are sized separately: the reference weight
    // is ~ s while node weights are ~ h
    let nodes_a = &a[..a.len() - 1];
    let (mut samples, n_nodes) = pilot_sized(nodes_a, options.repetitions, options.pilot, options.epsilon / 2.0f64.sqrt(), run)?;
    let last = a.len() - 1;
    let (ref_samples, n_ref) = pilot_sized(&a[last..], options.repetitions, options.pilot, options.epsilon / 2.0f64.sqrt(), |_, o, n| run(last, o, n))?;
    samples.extend(ref_samples);
    let (mut value, se) = combine(&samples, &a);
    value += lambda * h / 2.0;
    let steps = jobs.iter().map(|(_, c)| c.steps).max().unwrap_or(0);
    Ok(Estimate {
        value,
        std_error: se,
        n_samples: (n_nodes * (m - 1) + n_ref) as u64,
        chain_steps: steps,
        seed: streams.seed(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Side-by-side comparison of the surface-pressure identities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePressureHarness {
    pub interpolation: ThermoResult,
    /// Box form without the face term (`d >= 2` only).
    pub box_reduced: Option<ThermoResult>,
    /// Face integral `J`.
    pub face_integral: Estimate,
    /// `(1 - 1/d) I_quadrant + J / (2d)`: the box form with the face term kept.
    pub box_with_face: Estimate,
    /// Exact value where one is known (hard rods in `d = 1`).
    pub exact: Option<f64>,
    /// Exact `J` for hard rods (`p r - log(1 + p r)`).
    pub exact_face_integral: Option<f64>,
    /// Value of `J` asserted by the vanishing-face identity.
    pub face_integral_claimed: f64,
    /// Leading small-`lambda` term `lambda^2 r^2 / 2` of `J` for hard rods.
    pub face_integral_leading_order: f64,
}

/// Runs every surface-pressure estimator and the exact oracles.
pub fn surface_pressure_harness<T: Real>(
    potential: &Arc<PairPotential<T>>,
    dim: usize,
    lambda: f64,
    options: &ThermoOptions,
    streams: &Streams,
) -> Result<SurfacePressureHarness> {
    let interpolation = surface_pressure_interpolation(potential, dim, lambda, options, &streams.fork(1))?;
    let face = face_integral(potential, dim, lambda, options, &streams.fork(2))?;
    let d = dim as f64;
    let box_reduced = if dim >= 2 {
        Some(surface_pressure_box(potential, dim, lambda, options, &streams.fork(3))?)
    } else {
        None
    };
    let box_with_face = match &box_reduced {
        Some(b) => Estimate {
            value: b.estimate.value + face.value / (2.0 * d),
            std_error: b.estimate.std_error.hypot(face.std_error / (2.0 * d)),
            n_samples: b.estimate.n_samples + face.n_samples,
            ..face.clone()
        },
        None => Estimate {
            value: face.value / 2.0,
            std_error: face.std_error / 2.0,
            ..face.clone()
        },
    };
    let r = potential.range().f64();
    let hard_rods = dim == 1 && matches!(**potential, PairPotential::HardSphere { .. });
    let (exact, exact_face) = if hard_rods {
        let p = tonks_pressure_oracle(lambda, r);
        let j = p * r - (p * r).ln_1p();
        (Some(j / 2.0), Some(j))
    } else {
        (None, None)
    };
    Ok(SurfacePressureHarness {
        interpolation,
        box_reduced,
        face_integral: face,
        box_with_face,
        exact,
        exact_face_integral: exact_face,
        face_integral_claimed: 0.0,
        face_integral_leading_order: lambda * lambda * r * r / 2.0,
    })
}

/// `log Z` on the torus of side `n` minus `n^d p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGap {
    pub side: f64,
    pub gap: Estimate,
    pub log_z: CountingReport,
    pub pressure: ThermoResult,
}

/// Monte-Carlo `log Z_{T_n^d} - n^d p` from the telescoped counter on the
/// torus and the single-density pressure.
pub fn torus_pressure_gap<T: Real>(
    potential: &Arc<PairPotential<T>>,
    dim: usize,
    lambda: f64,
    side: f64,
    options: &ThermoOptions,
    counting: &CountingOptions,
    streams: &Streams,
) -> Result<TorusGap> {
    check_lambda(lambda)?;
    let r = potential.range().f64();
    if !(side > 2.0 * r) {
        return Err(Error::param("side", "torus side must exceed twice the potential range"));
    }
    let start = Instant::now();
    let torus = Region::torus(dim, T::of(side))?;
    let activity = ActivityFunction::constant(dim, T::of(lambda))?;
    let model = GibbsModel::new(torus, Arc::clone(potential), activity)?;
    let log_z = approx_log_partition(&model, options.epsilon, counting, &streams.fork(1))?;
    let pressure = estimate_pressure(potential, dim, lambda, options, &streams.fork(2))?;
    let vol = side.powi(dim as i32);
    let gap = Estimate {
        value: log_z.log_z.value - vol * pressure.estimate.value,
        std_error: log_z.log_z.std_error.hypot(vol * pressure.estimate.std_error),
        n_samples: log_z.log_z.n_samples + pressure.estimate.n_samples,
        chain_steps: log_z.log_z.chain_steps.max(pressure.estimate.chain_steps),
        seed: streams.seed(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(TorusGap {
        side,
        gap,
        log_z,
        pressure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{tonks_log_partition, tonks_ring_log_partition};

    fn ideal() -> Arc<PairPotential<f64>> {
        Arc::new(PairPotential::ideal())
    }

    fn quick() -> ThermoOptions {
        ThermoOptions {
            epsilon: 0.1,
            repetitions: Some(20),
            window: Some(2.0),
            ..Default::default()
        }
    }

    #[test]
    fn tonks_pressure_solves_equation_of_state() {
        let p = tonks_pressure_oracle(1.0, 0.5);
        assert!((p - 0.7034674224983917).abs() < 1e-12);
        assert!((p * (p * 0.5).exp() - 1.0).abs() < 1e-12);
        assert!((tonks_pressure_oracle(2.0, 1e-12) - 2.0).abs() < 1e-9);
        for &(l, r) in &[(0.1, 1.0), (5.0, 0.3), (30.0, 2.0)] {
            let p = tonks_pressure_oracle(l, r);
            assert!((p * (p * r).exp() - l).abs() < 1e-12 * l);
        }
        let z64 = tonks_log_partition(64.0, 0.5, 1.0) / 64.0;
        assert!((z64 - p).abs() < 1e-2);
    }

    #[test]
    fn ring_gap_is_tiny_at_moderate_sides() {
        let p = tonks_pressure_oracle(1.0, 0.5);
        assert!((tonks_ring_log_partition(8.0, 0.5, 1.0) - 8.0 * p).abs() < 1e-3);
    }

    #[test]
    fn exact_surface_pressure_matches_finite_segments() {
        let (l, r) = (1.0, 0.5);
        let p = tonks_pressure_oracle(l, r);
        let sp = (p * r - (p * r).ln_1p()) / 2.0;
        for len in [8.0, 16.0, 32.0] {
            let finite = (tonks_log_partition(len, r, l) - len * p) / 2.0;
            assert!((finite - sp).abs() < 1e-6, "{len}: {finite} vs {sp}");
        }
    }

    #[test]
    fn ideal_gas_identities_are_exact() {
        let s = Streams::new(3);
        for dim in [1, 2] {
            let p = estimate_pressure(&ideal(), dim, 0.7, &quick(), &s).unwrap();
            assert!((p.estimate.value - 0.7).abs() < 1e-12);
            assert_eq!(p.method, Method::SingleDensity);
            let q = pressure_via_interpolation(&ideal(), dim, 0.7, &quick(), &s).unwrap();
            assert!((q.estimate.value - 0.7).abs() < 1e-12);
            let sp = surface_pressure_interpolation(&ideal(), dim, 0.7, &quick(), &s).unwrap();
            assert!(sp.estimate.value.abs() < 1e-12);
        }
        let b = surface_pressure_box(&ideal(), 2, 0.7, &quick(), &s).unwrap();
        assert!(b.estimate.value.abs() < 1e-12);
        assert!(surface_pressure_box(&ideal(), 1, 0.7, &quick(), &s).is_err());
        let j = face_integral(&ideal(), 1, 0.7, &quick(), &s).unwrap();
        assert!(j.value.abs() < 1e-12, "{j:?}");
    }

    #[test]
    fn mesh_covers_window() {
        let o = ThermoOptions { epsilon: 0.05, ..Default::default() };
        for dim in [1, 2, 3] {
            let m = o.mesh_for(dim, 5.0);
            assert!(m.span() >= 5.0);
            let w: f64 = m.weights().iter().sum();
            assert!((w - m.span()).abs() < 1e-9);
        }
        assert_eq!(o.window_constant_for(0.5), 1.0);
        let b = ThermoOptions { decay_rate: Some(4.0), ..o.clone() };
        assert_eq!(b.window_constant_for(0.5), 2.0);
    }

    #[test]
    fn pressure_never_exceeds_lambda() {
        let pot = Arc::new(PairPotential::hard_sphere(0.5).unwrap());
        let opts = ThermoOptions { repetitions: Some(200), ..quick() };
        let p = estimate_pressure(&pot, 1, 1.0, &opts, &Streams::new(9)).unwrap();
        assert!(p.estimate.value - 3.0 * p.estimate.std_error <= 1.0);
        assert!(p.estimate.value > 0.0);
    }

    #[test]
    fn torus_gap_validates_side() {
        let pot = Arc::new(PairPotential::hard_sphere(0.5).unwrap());
        let r = torus_pressure_gap(&pot, 1, 1.0, 0.8, &quick(), &CountingOptions::default(), &Streams::new(1));
        assert!(r.is_err());
    }
}
