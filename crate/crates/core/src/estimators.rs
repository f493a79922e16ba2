//! Energy functionals and Monte-Carlo estimators of one-point densities,
//! emptiness probabilities and factorised k-point densities.
//!
//! A density estimate runs `N` independent chains and averages
//! `lambda(v) e^{-H_v(X)}` over their final states, so every sample lies in
//! `[0, lambda(v)]` and the variance is at most `lambda^2 / N`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CellIndex, Point, Region};
use crate::potential::PairPotential;
use crate::rng::Streams;
use crate::sampler::{par_chains, run_chain, BlockDynamicsConfig, ChainState, GibbsModel};
use crate::scalar::{exp_neg, Real};

/// A Monte-Carlo estimate with its bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// Sample standard deviation over `sqrt(n_samples)`.
    pub std_error: f64,
    pub n_samples: u64,
    /// Block updates per chain.
    pub chain_steps: u64,
    pub seed: u64,
    pub wall_time_s: f64,
}

impl Estimate {
    /// Mean and standard error of `samples`.
    pub fn from_samples(samples: &[f64], chain_steps: u64, seed: u64, wall_time_s: f64) -> Self {
        let (mean, se) = mean_and_se(samples);
        Estimate {
            value: mean,
            std_error: se,
            n_samples: samples.len() as u64,
            chain_steps,
            seed,
            wall_time_s,
        }
    }

    /// A value known without sampling error.
    pub fn exact(value: f64, seed: u64) -> Self {
        Estimate {
            value,
            std_error: 0.0,
            n_samples: 1,
            chain_steps: 0,
            seed,
            wall_time_s: 0.0,
        }
    }

    /// `|a - b| / sqrt(se_a^2 + se_b^2)`; infinite for distinct exact values.
    pub fn z_distance(&self, other: &Estimate) -> f64 {
        let diff = (self.value - other.value).abs();
        let se = self.std_error.hypot(other.std_error);
        if diff == 0.0 {
            0.0
        } else {
            diff / se
        }
    }

    /// Whether `value` lies within `k` standard errors of the estimate.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.value - value).abs() <= k * self.std_error
    }
}

/// Sample mean and standard error (zero for a single sample).
pub fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Repetitions needed for a density estimate with bound `lambda` to have
/// standard error at most `epsilon / 6`.
pub fn repetitions_for(lambda: f64, epsilon: f64) -> usize {
    ((36.0 * lambda * lambda / (epsilon * epsilon)).ceil() as usize).max(2)
}

/// `H_v(X) = sum_{x in X} phi(v - x)` over the indexed configuration.
pub fn added_energy<T: Real>(potential: &PairPotential<T>, config: &CellIndex<T>, v: &Point<T>) -> T {
    let mut h = T::zero();
    config.for_each_within(v, potential.range(), |_, d| h = h + potential.value_at(d));
    h
}

/// `H_v(X)` for an unindexed point list, using the geometry's metric.
pub fn added_energy_points<T: Real>(
    potential: &PairPotential<T>,
    geometry: &Region<T>,
    points: &[Point<T>],
    v: &Point<T>,
) -> T {
    points
        .iter()
        .fold(T::zero(), |h, x| h + potential.value_at(geometry.distance(v, x)))
}

/// `H(X) = sum_{i<j} phi(x_i - x_j)`.
pub fn total_energy<T: Real>(potential: &PairPotential<T>, geometry: &Region<T>, points: &[Point<T>]) -> T {
    if points.len() < 2 {
        return T::zero();
    }
    if geometry.is_bounded() {
        if let Ok(mut index) = CellIndex::new(geometry.clone(), potential.range()) {
            let mut h = T::zero();
            for p in points {
                if index.insert(p.clone()).is_err() {
                    return pairwise_energy(potential, geometry, points);
                }
            }
            // each unordered pair is visited twice; skip the self match
            for p in index.iter() {
                index.for_each_within(p, potential.range(), |q, d| {
                    if !std::ptr::eq(p, q) {
                        h = h + potential.value_at(d);
                    }
                });
            }
            return h / T::of(2.0);
        }
    }
    pairwise_energy(potential, geometry, points)
}

fn pairwise_energy<T: Real>(potential: &PairPotential<T>, geometry: &Region<T>, points: &[Point<T>]) -> T {
    let mut h = T::zero();
    for (i, p) in points.iter().enumerate() {
        for q in &points[..i] {
            h = h + potential.value_at(geometry.distance(p, q));
        }
    }
    h
}

/// Density estimation task: `N` chains of `chain.steps` updates each.
#[derive(Clone, Debug)]
pub struct DensityRequest<T> {
    pub model: GibbsModel<T>,
    pub v: Point<T>,
    pub epsilon: f64,
    pub repetitions: usize,
    pub chain: BlockDynamicsConfig<T>,
}

impl<T: Real> DensityRequest<T> {
    /// Defaults: `N = ceil(36 lambda^2 / eps^2)`, `L = 2r` unless given, and
    /// `T = ceil(C V log(V / eps))`.
    pub fn new(model: GibbsModel<T>, v: Point<T>, epsilon: f64, c: f64, radius: Option<T>) -> Result<Self> {
        v.check_dim(model.dim())?;
        let chain = BlockDynamicsConfig::for_model(&model, radius, c, epsilon)?;
        let repetitions = repetitions_for(model.activity().bound().f64(), epsilon);
        Ok(DensityRequest {
            model,
            v,
            epsilon,
            repetitions,
            chain,
        })
    }

    pub fn with_repetitions(mut self, n: usize) -> Self {
        self.repetitions = n.max(1);
        self
    }
}

/// Runs `n` chains and maps each final state through `f`.
pub fn chain_samples<T: Real, R: Send>(
    model: &GibbsModel<T>,
    cfg: &BlockDynamicsConfig<T>,
    n: usize,
    streams: &Streams,
    f: impl Fn(&ChainState<T>) -> R + Sync + Send,
) -> Result<Vec<R>> {
    par_chains(n, streams, |rng| Ok(f(&run_chain(model, cfg, rng)?)))
}

/// Per-chain samples `lambda(v) e^{-H_v(X_j)}`.
pub fn density_samples<T: Real>(req: &DensityRequest<T>, streams: &Streams) -> Result<Vec<f64>> {
    let lv = req.model.activity().value(&req.v).f64();
    if lv == 0.0 {
        return Ok(vec![0.0; req.repetitions]);
    }
    let pot = req.model.potential();
    let v = req.model.geometry().canonicalize(&req.v);
    chain_samples(&req.model, &req.chain, req.repetitions, streams, |s| {
        lv * exp_neg(added_energy(pot, s.index(), &v).f64())
    })
}

/// Estimate of `rho(v) = lambda(v) E e^{-H_v}`; exactly `0` where the
/// activity vanishes.
pub fn estimate_density<T: Real>(req: &DensityRequest<T>, streams: &Streams) -> Result<Estimate> {
    let start = Instant::now();
    let lv = req.model.activity().value(&req.v).f64();
    if lv == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            std_error: 0.0,
            n_samples: req.repetitions as u64,
            chain_steps: 0,
            seed: streams.seed(),
            wall_time_s: start.elapsed().as_secs_f64(),
        });
    }
    let samples = density_samples(req, streams)?;
    Ok(Estimate::from_samples(
        &samples,
        req.chain.steps,
        streams.seed(),
        start.elapsed().as_secs_f64(),
    ))
}

/// Estimate of `mu(X cap S = empty)`.
pub fn estimate_emptiness<T: Real>(
    model: &GibbsModel<T>,
    subregion: &Region<T>,
    repetitions: usize,
    cfg: &BlockDynamicsConfig<T>,
    streams: &Streams,
) -> Result<Estimate> {
    if subregion.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: subregion.dim(),
        });
    }
    let start = Instant::now();
    let samples = chain_samples(model, cfg, repetitions, streams, |s| {
        if s.index().iter().any(|p| subregion.contains(p)) {
            0.0
        } else {
            1.0
        }
    })?;
    Ok(Estimate::from_samples(
        &samples,
        cfg.steps,
        streams.seed(),
        start.elapsed().as_secs_f64(),
    ))
}

/// Product of independent estimates; error by first-order propagation and
/// an exact zero when any factor is exactly zero.
pub fn product_estimate(factors: &[Estimate], seed: u64, wall_time_s: f64) -> Estimate {
    let value: f64 = factors.iter().map(|e| e.value).product();
    let exact_zero = factors.iter().any(|e| e.value == 0.0 && e.std_error == 0.0);
    let var: f64 = if exact_zero {
        0.0
    } else {
        (0..factors.len())
            .map(|j| {
                let others: f64 = factors
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .map(|(_, e)| e.value)
                    .product();
                (factors[j].std_error * others).powi(2)
            })
            .sum()
    };
    Estimate {
        value,
        std_error: var.sqrt(),
        n_samples: factors.iter().map(|e| e.n_samples).sum(),
        chain_steps: factors.iter().map(|e| e.chain_steps).max().unwrap_or(0),
        seed,
        wall_time_s,
    }
}

/// `rho(v_1..v_k) = prod_j rho_{lambda_j}(v_j)` with `lambda_j` the activity
/// tilted by `v_1..v_{j-1}`. `template` supplies `N`, `eps` and the chain.
pub fn estimate_kpoint_density<T: Real>(
    template: &DensityRequest<T>,
    points: &[Point<T>],
    streams: &Streams,
) -> Result<Estimate> {
    if points.is_empty() {
        return Err(Error::param("points", "need at least one point"));
    }
    let start = Instant::now();
    let pot = template.model.potential();
    let mut factors = Vec::with_capacity(points.len());
    for (j, v) in points.iter().enumerate() {
        let activity = template.model.activity().tilt_by_points(&points[..j], pot)?;
        let req = DensityRequest {
            model: template.model.with_activity(activity)?,
            v: v.clone(),
            ..template.clone()
        };
        let e = estimate_density(&req, &streams.fork(j as u64))?;
        let zero = e.value == 0.0 && e.std_error == 0.0 && req.model.activity().value(v) == T::zero();
        factors.push(e);
        if zero {
            break;
        }
    }
    Ok(product_estimate(&factors, streams.seed(), start.elapsed().as_secs_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activity::ActivityFunction;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn model(pot: PairPotential<f64>, dim: usize, side: f64, lambda: f64) -> GibbsModel<f64> {
        let g = Region::cube(dim, 0.0, side).unwrap();
        let a = ActivityFunction::constant_on(g.clone(), lambda).unwrap();
        GibbsModel::new(g, Arc::new(pot), a).unwrap()
    }

    fn random_points(rng: &mut ChaCha8Rng, n: usize, side: f64) -> Vec<Point<f64>> {
        (0..n)
            .map(|_| Point::new(&[rng.random_range(0.0..side), rng.random_range(0.0..side)]))
            .collect()
    }

    #[test]
    fn estimate_statistics() {
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 4.0], 7, 1, 0.0);
        assert_eq!(e.value, 2.5);
        assert!((e.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(Estimate::from_samples(&[3.0], 1, 1, 0.0).std_error, 0.0);
    }

    #[test]
    fn energies_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let strauss = PairPotential::strauss(1.0, 0.7).unwrap();
        let g = Region::cube(2, 0.0, 5.0).unwrap();
        for _ in 0..20 {
            let pts = random_points(&mut rng, 50, 5.0);
            let mut brute = 0.0;
            for i in 0..pts.len() {
                for j in 0..i {
                    if (&pts[i] - &pts[j]).norm() < 1.0 {
                        brute += 0.7;
                    }
                }
            }
            assert!((total_energy(&strauss, &g, &pts) - brute).abs() < 1e-9);
            let mut index = CellIndex::new(g.clone(), 1.0).unwrap();
            for p in &pts {
                index.insert(p.clone()).unwrap();
            }
            let v = Point::new(&[rng.random_range(0.0..5.0), rng.random_range(0.0..5.0)]);
            let near = pts.iter().filter(|p| (&v - *p).norm() < 1.0).count();
            assert!((added_energy(&strauss, &index, &v) - 0.7 * near as f64).abs() < 1e-9);
            assert_eq!(added_energy_points(&strauss, &g, &pts, &v), added_energy(&strauss, &index, &v));
        }
    }

    #[test]
    fn energy_edge_cases() {
        let hs = PairPotential::hard_sphere(1.0).unwrap();
        let g = Region::cube(2, 0.0, 5.0).unwrap();
        let index = CellIndex::new(g.clone(), 1.0).unwrap();
        assert_eq!(added_energy(&hs, &index, &Point::new(&[1.0, 1.0])), 0.0);
        assert_eq!(total_energy(&hs, &g, &[Point::new(&[1.0, 1.0])]), 0.0);
        let packing = [Point::new(&[0.5, 0.5]), Point::new(&[1.6, 0.5]), Point::new(&[0.5, 1.6])];
        assert_eq!(total_energy(&hs, &g, &packing), 0.0);
        let overlap = [Point::new(&[0.5, 0.5]), Point::new(&[1.0, 0.5])];
        assert_eq!(total_energy(&hs, &g, &overlap), f64::INFINITY);
        let mut idx = index.clone();
        idx.insert(Point::new(&[2.0, 2.0])).unwrap();
        assert_eq!(added_energy(&hs, &idx, &Point::new(&[2.5, 2.0])), f64::INFINITY);
    }

    #[test]
    fn ideal_density_equals_activity() {
        let m = model(PairPotential::ideal(), 2, 2.0, 1.3);
        let req = DensityRequest::new(m, Point::new(&[1.0, 1.0]), 0.1, 10.0, None)
            .unwrap()
            .with_repetitions(50);
        let e = estimate_density(&req, &Streams::new(1)).unwrap();
        assert!((e.value - 1.3).abs() < 1e-12);
        assert!(e.std_error < 1e-12);
    }

    #[test]
    fn zero_activity_gives_exact_zero() {
        let m = model(PairPotential::hard_sphere(0.5).unwrap(), 1, 2.0, 1.0);
        let req = DensityRequest::new(m, Point::new(&[5.0]), 0.1, 10.0, None).unwrap();
        let e = estimate_density(&req, &Streams::new(1)).unwrap();
        assert_eq!((e.value, e.std_error), (0.0, 0.0));
    }

    #[test]
    fn every_sample_lies_in_zero_lambda() {
        let m = model(PairPotential::strauss(1.0, 0.5).unwrap(), 2, 4.0, 0.8);
        let req = DensityRequest::new(m, Point::new(&[2.0, 2.0]), 0.2, 5.0, None)
            .unwrap()
            .with_repetitions(200);
        for s in density_samples(&req, &Streams::new(3)).unwrap() {
            assert!((0.0..=0.8).contains(&s));
        }
    }

    #[test]
    fn kpoint_density_cases() {
        let hs = model(PairPotential::hard_sphere(1.0).unwrap(), 2, 4.0, 0.5);
        let req = DensityRequest::new(hs, Point::new(&[2.0, 2.0]), 0.2, 5.0, None)
            .unwrap()
            .with_repetitions(40);
        let s = Streams::new(7);
        let one = estimate_kpoint_density(&req, &[Point::new(&[2.0, 2.0])], &s).unwrap();
        let direct = estimate_density(&req, &s.fork(0)).unwrap();
        assert_eq!(one.value, direct.value);
        let close = estimate_kpoint_density(&req, &[Point::new(&[2.0, 2.0]), Point::new(&[2.5, 2.0])], &s).unwrap();
        assert_eq!((close.value, close.std_error), (0.0, 0.0));

        let ideal = model(PairPotential::ideal(), 2, 4.0, 0.5);
        let req = DensityRequest::new(ideal, Point::new(&[2.0, 2.0]), 0.2, 5.0, None)
            .unwrap()
            .with_repetitions(10);
        let pts = [Point::new(&[1.0, 1.0]), Point::new(&[1.2, 1.0]), Point::new(&[3.0, 3.0])];
        let e = estimate_kpoint_density(&req, &pts, &s).unwrap();
        assert!((e.value - 0.125).abs() < 1e-15);
    }

    #[test]
    fn product_error_propagation() {
        let a = Estimate { value: 2.0, std_error: 0.1, ..Estimate::exact(0.0, 0) };
        let b = Estimate { value: 3.0, std_error: 0.2, ..Estimate::exact(0.0, 0) };
        let p = product_estimate(&[a, b], 0, 0.0);
        assert_eq!(p.value, 6.0);
        assert!((p.std_error - (0.3f64.powi(2) + 0.4f64.powi(2)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ideal_emptiness_is_void_probability() {
        let m = model(PairPotential::ideal(), 2, 2.0, 1.0);
        let cfg = BlockDynamicsConfig::for_model(&m, None, 10.0, 0.01).unwrap();
        let sub = Region::cube(2, 0.0, 1.0).unwrap();
        let e = estimate_emptiness(&m, &sub, 4000, &cfg, &Streams::new(5)).unwrap();
        assert!(e.covers((-1.0f64).exp(), 3.0), "{e:?}");
    }
}
