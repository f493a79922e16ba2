//! Empirical strong spatial mixing: boundary-influence decay of densities,
//! the connective contraction bound, and the density recursion on tiny
//! instances.

use std::f64::consts::E;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::connective::ConnectiveReport;
use crate::counting::{series_log_partition_oracle_with, OracleOptions};
use crate::error::{Error, Result};
use crate::estimators::{density_samples, mean_and_se, DensityRequest, Estimate};
use crate::geometry::Point;
use crate::quadrature::composite_gauss;
use crate::rng::Streams;
use crate::sampler::GibbsModel;
use crate::scalar::{exp_neg, Real};

/// The request with its activity tilted by fixed points at `boundary`.
fn tilted<T: Real>(req: &DensityRequest<T>, boundary: &[Point<T>]) -> Result<DensityRequest<T>> {
    let activity = req
        .model
        .activity()
        .tilt_by_points(boundary, req.model.potential())?;
    Ok(DensityRequest {
        model: req.model.with_activity(activity)?,
        ..req.clone()
    })
}

fn paired_gap(base: &[f64], other: &[f64], steps: u64, seed: u64, start: Instant) -> Estimate {
    let diff: Vec<f64> = base.iter().zip(other).map(|(a, b)| a - b).collect();
    let (mean, se) = mean_and_se(&diff);
    Estimate {
        value: mean.abs(),
        std_error: se,
        n_samples: diff.len() as u64,
        chain_steps: steps,
        seed,
        wall_time_s: start.elapsed().as_secs_f64(),
    }
}

/// `|rho_lambda(v) - rho_lambda'(v)|` with `lambda' = lambda prod_b e^{-phi(b - .)}`,
/// from paired chains sharing their random streams.
pub fn boundary_gap<T: Real>(req: &DensityRequest<T>, boundary: &[Point<T>], streams: &Streams) -> Result<Estimate> {
    let start = Instant::now();
    let other = tilted(req, boundary)?;
    let a = density_samples(req, streams)?;
    let b = density_samples(&other, streams)?;
    Ok(paired_gap(&a, &b, req.chain.steps, streams.seed(), start))
}

/// `v +- t e_i` for every axis.
pub fn axis_boundary<T: Real>(v: &Point<T>, t: f64) -> Vec<Point<T>> {
    let d = v.dim();
    (0..d)
        .flat_map(|i| {
            [1.0, -1.0].map(|s| v.add_scaled(&Point::axis(d, i, T::one()), T::of(s * t)))
        })
        .collect()
}

/// Weighted log-linear fit `log(g + sigma) = log alpha - beta t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub alpha: f64,
    pub beta: f64,
    pub beta_std_error: f64,
    /// 95% interval for `beta`.
    pub beta_ci: (f64, f64),
    /// Weighted residual sum of squares and its degrees of freedom.
    pub chi_square: f64,
    pub dof: usize,
}

/// Measured boundary influence over a ladder of distances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SSMDecayFit {
    pub distances: Vec<f64>,
    pub gaps: Vec<Estimate>,
    /// `dist(v, supp(lambda - lambda'))` per ladder point.
    pub separations: Vec<f64>,
    /// `2 lambda (lambda / e)^{k/2} sqrt(V_k)`, `k = floor(separation / r)`;
    /// absent when `V_k` is not available.
    pub bounds: Vec<Option<f64>>,
    /// Whether `gap <= bound + 3 sigma`.
    pub within_bound: Vec<Option<bool>>,
    pub fit: Option<DecayFit>,
    /// Why no fit was produced.
    pub note: Option<String>,
}

impl SSMDecayFit {
    pub fn all_within_bound(&self) -> bool {
        self.within_bound.iter().all(|b| *b == Some(true))
    }
}

/// Weighted least squares of `ln(g + sigma)` on `t` with weights
/// `((g + sigma) / sigma)^2`; the slope error is inflated by
/// `sqrt(chi^2 / dof)` when the residuals exceed their nominal spread.
pub fn fit_decay(distances: &[f64], gaps: &[Estimate]) -> Result<DecayFit> {
    if distances.len() != gaps.len() || distances.len() < 3 {
        return Err(Error::DegenerateFit("need at least three ladder points".into()));
    }
    if gaps.iter().all(|g| g.value <= 2.0 * g.std_error) {
        return Err(Error::DegenerateFit("decay faster than resolvable".into()));
    }
    let mut pts = Vec::new();
    for (&t, g) in distances.iter().zip(gaps) {
        if g.std_error > 0.0 {
            let y = g.value + g.std_error;
            pts.push((t, y.ln(), (y / g.std_error).powi(2)));
        }
    }
    if pts.len() < 3 {
        return Err(Error::DegenerateFit("decay faster than resolvable".into()));
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let tm = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let ym = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let stt: f64 = pts.iter().map(|p| p.2 * (p.0 - tm).powi(2)).sum();
    if !(stt > 0.0) {
        return Err(Error::DegenerateFit("distances do not vary".into()));
    }
    let slope = pts.iter().map(|p| p.2 * (p.0 - tm) * (p.1 - ym)).sum::<f64>() / stt;
    let intercept = ym - slope * tm;
    let chi_square: f64 = pts
        .iter()
        .map(|p| p.2 * (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let dof = pts.len() - 2;
    let inflation = (chi_square / dof as f64).sqrt().max(1.0);
    let se = inflation / stt.sqrt();
    let beta = -slope;
    Ok(DecayFit {
        alpha: intercept.exp(),
        beta,
        beta_std_error: se,
        beta_ci: (beta - 1.96 * se, beta + 1.96 * se),
        chi_square,
        dof,
    })
}

/// Contraction bound `2 lambda (lambda / e)^{k/2} sqrt(V_k)`.
pub fn contraction_bound(lambda: f64, k: usize, v_k: f64) -> f64 {
    2.0 * lambda * (lambda / E).powf(k as f64 / 2.0) * v_k.sqrt()
}

/// Gaps at `v` from boundary points `v +- t e_i` for each `t` in the ladder,
/// a decay fit, and the contraction-bound check against `connective`.
pub fn decay_profile<T: Real>(
    req: &DensityRequest<T>,
    ladder: &[f64],
    connective: Option<&ConnectiveReport>,
    streams: &Streams,
) -> Result<SSMDecayFit> {
    let r = req.model.potential().range().f64();
    if ladder.len() < 4 {
        return Err(Error::param("ladder", "need at least four distances"));
    }
    if ladder.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("ladder", "distances must increase strictly"));
    }
    if *ladder.last().unwrap() < 4.0 * r * (1.0 - 1e-12) {
        return Err(Error::param("ladder", "must reach at least 4r"));
    }
    let lambda = req.model.activity().bound().f64();
    let base = density_samples(req, streams)?;
    let mut gaps = Vec::new();
    let mut separations = Vec::new();
    let mut bounds = Vec::new();
    let mut within = Vec::new();
    for &t in ladder {
        let start = Instant::now();
        let boundary = axis_boundary(&req.v, t);
        let other = density_samples(&tilted(req, &boundary)?, streams)?;
        let gap = paired_gap(&base, &other, req.chain.steps, streams.seed(), start);
        let sep = (t - r).max(0.0);
        let k = if r > 0.0 { (sep / r + 1e-9).floor() as usize } else { 0 };
        let bound = connective.and_then(|c| c.v_k(k)).map(|vk| contraction_bound(lambda, k, vk));
        within.push(bound.map(|b| gap.value <= b + 3.0 * gap.std_error));
        bounds.push(bound);
        separations.push(sep);
        gaps.push(gap);
    }
    let (fit, note) = match fit_decay(ladder, &gaps) {
        Ok(f) => (Some(f), None),
        Err(Error::DegenerateFit(msg)) => (None, Some(msg)),
        Err(e) => return Err(e),
    };
    Ok(SSMDecayFit {
        distances: ladder.to_vec(),
        gaps,
        separations,
        bounds,
        within_bound: within,
        fit,
        note,
    })
}

/// Quadrature and oracle budget of the recursion check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecursionOptions {
    /// Gauss panels on each side of `v`.
    pub panels: usize,
    pub order: usize,
    pub tolerance: f64,
    pub oracle: OracleOptions,
}

impl Default for RecursionOptions {
    fn default() -> Self {
        RecursionOptions {
            panels: 1,
            order: 6,
            tolerance: 3e-4,
            oracle: OracleOptions {
                points_per_shift: 1 << 15,
                ..OracleOptions::default()
            },
        }
    }
}

/// Both sides of `rho(v) = lambda(v) exp(-int rho_{lambda_{v->w}}(w) (1 - e^{-phi(v - w)}) dw)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecursionCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub nodes: usize,
    /// Sum of the oracle error budgets of every density used.
    pub oracle_error: f64,
}

/// `(rho(x), error)` as a ratio of oracle partition functions.
fn oracle_density<T: Real>(model: &GibbsModel<T>, x: &Point<T>, options: &RecursionOptions) -> Result<(f64, f64)> {
    let lx = model.activity().value(x).f64();
    if lx == 0.0 {
        return Ok((0.0, 0.0));
    }
    let pot = model.potential();
    let base = series_log_partition_oracle_with(model, options.tolerance, &options.oracle)?;
    let tilted_act = model.activity().tilt_by_points(std::slice::from_ref(x), pot)?;
    let tilted = series_log_partition_oracle_with(&model.with_activity(tilted_act)?, options.tolerance, &options.oracle)?;
    let rho = lx * (tilted.log_z - base.log_z).exp();
    Ok((rho, rho * (tilted.error + base.error)))
}

/// Residual of the density recursion at `v` for a one-dimensional model,
/// every density from the series oracle and the `w` integral by composite
/// Gauss on `B_r(v)` split at `v`.
pub fn recursion_residual<T: Real>(model: &GibbsModel<T>, v: &Point<T>, options: &RecursionOptions) -> Result<RecursionCheck> {
    if model.dim() != 1 {
        return Err(Error::param("dim", "the recursion check quadrature is one-dimensional"));
    }
    v.check_dim(1)?;
    let pot: Arc<_> = Arc::clone(model.potential());
    let lv = model.activity().value(v).f64();
    if lv == 0.0 {
        return Ok(RecursionCheck {
            lhs: 0.0,
            rhs: 0.0,
            residual: 0.0,
            nodes: 0,
            oracle_error: 0.0,
        });
    }
    let (lhs, mut err) = oracle_density(model, v, options)?;
    let r = pot.range().f64();
    let c = v[0].f64();
    let mut nodes = composite_gauss(c - r, c, options.panels, options.order);
    nodes.extend(composite_gauss(c, c + r, options.panels, options.order));
    let mut integral = 0.0;
    for &(x, w) in &nodes {
        let wp = Point::new(&[T::of(x)]);
        let kernel = 1.0 - exp_neg(pot.value_at(T::of((x - c).abs())).f64());
        if kernel == 0.0 {
            continue;
        }
        let act = model.activity().recursion_tilt(v.clone(), wp.clone(), Arc::clone(&pot))?;
        let (rho, e) = oracle_density(&model.with_activity(act)?, &wp, options)?;
        integral += w * rho * kernel;
        err += w * e * kernel;
    }
    let rhs = lv * (-integral).exp();
    Ok(RecursionCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        nodes: nodes.len(),
        oracle_error: err,
    })
}
