//! Approximate counting of `log Z` and exact desk-scale oracles.
//!
//! `Z = 1 / mu(X = empty)`, and the emptiness probability telescopes over a
//! partition of the box into unit cells `S_1..S_N`:
//! `1/Z = prod_k mu_{Lambda^(k)}(X cap S_{k+1} = empty)`, where
//! `Lambda^(k)` removes the first `k` cells. Each factor is at least
//! `e^{-lambda |S|}` by Poisson domination, so all factors are well
//! conditioned.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{estimate_density, estimate_emptiness, DensityRequest, Estimate};
use crate::geometry::{Point, Region};
use crate::quadrature::Kronecker;
use crate::rng::Streams;
use crate::sampler::{BlockDynamicsConfig, GibbsModel, DEFAULT_MIXING_CONSTANT};
use crate::scalar::{exp_neg, Real};

/// Disjoint unit cells covering a box or torus, ordered lexicographically.
/// Non-integer sides end in one thinner remainder layer per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitPartition<T> {
    cells: Vec<Region<T>>,
}

impl<T: Real> UnitPartition<T> {
    pub fn new(region: &Region<T>) -> Result<Self> {
        let (lo, hi) = match region {
            Region::Box { .. } | Region::Torus { .. } => region.bounding_box().expect("bounded"),
            _ => return Err(Error::InvalidRegion("unit partitions need a box or torus".into())),
        };
        let dim = lo.dim();
        let mut breaks: Vec<Vec<T>> = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut b = vec![lo[i]];
            let mut x = lo[i];
            // break points lo, lo + 1, ..., with a remainder below 1e-9 folded in
            while hi[i] - x > T::one() + T::of(1e-9) {
                x = x + T::one();
                b.push(x);
            }
            b.push(hi[i]);
            breaks.push(b);
        }
        let mut cells = Vec::new();
        let mut idx = vec![0usize; dim];
        loop {
            let a: Vec<T> = (0..dim).map(|i| breaks[i][idx[i]]).collect();
            let b: Vec<T> = (0..dim).map(|i| breaks[i][idx[i] + 1]).collect();
            cells.push(Region::new_box(Point::new(&a), Point::new(&b))?);
            let mut i = dim;
            loop {
                if i == 0 {
                    return Ok(UnitPartition { cells });
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] + 1 < breaks[i].len() {
                    break;
                }
                idx[i] = 0;
            }
        }
    }

    pub fn cells(&self) -> &[Region<T>] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Bounding box of `Lambda^(k)`, the union of cells `k..N`.
    fn remaining_box(&self, k: usize) -> Region<T> {
        let rest = &self.cells[k..];
        let (mut lo, mut hi) = rest[0].bounding_box().expect("cells are boxes");
        let mut lo_v = lo.coords().to_vec();
        let mut hi_v = hi.coords().to_vec();
        for c in rest {
            let (a, b) = c.bounding_box().expect("cells are boxes");
            for i in 0..lo_v.len() {
                lo_v[i] = lo_v[i].min(a[i]);
                hi_v[i] = hi_v[i].max(b[i]);
            }
        }
        lo = Point::new(&lo_v);
        hi = Point::new(&hi_v);
        Region::Box { lo, hi }
    }
}

/// Tuning of the telescoped emptiness estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingOptions {
    /// Samples per factor `T = C N / eps^2`.
    pub sample_constant: f64,
    /// Mixing constant of each chain.
    pub mixing_constant: f64,
    /// Update radius; `2r` when absent.
    pub radius: Option<f64>,
}

impl Default for CountingOptions {
    fn default() -> Self {
        CountingOptions {
            sample_constant: 64.0,
            mixing_constant: DEFAULT_MIXING_CONSTANT,
            radius: None,
        }
    }
}

/// Per-factor emptiness estimates and the combined `log Z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingReport {
    pub log_z: Estimate,
    pub factors: Vec<Estimate>,
    pub samples_per_factor: usize,
}

/// `eps`-relative approximation of `Z` on a box or torus by telescoped
/// emptiness probabilities.
pub fn approx_log_partition<T: Real>(
    model: &GibbsModel<T>,
    epsilon: f64,
    options: &CountingOptions,
    streams: &Streams,
) -> Result<CountingReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param("epsilon", "must lie in (0, 1)"));
    }
    if !(options.sample_constant > 0.0) {
        return Err(Error::param("sample_constant", "must be positive"));
    }
    let start = Instant::now();
    let partition = UnitPartition::new(model.geometry())?;
    let n = partition.len();
    if model.activity().bound() == T::zero() {
        return Ok(CountingReport {
            log_z: Estimate::exact(0.0, streams.seed()),
            factors: vec![Estimate::exact(1.0, streams.seed()); n],
            samples_per_factor: 0,
        });
    }
    let volume = model.volume().f64();
    let samples = (options.sample_constant * volume.max(1.0) / (epsilon * epsilon)).ceil() as usize;
    // each factor is >= e^{-lambda|S|}; a TV error of eps/(2N) per factor
    // keeps the accumulated bias of log Z within eps/2 at moderate lambda
    let chain_eps = (epsilon / (2.0 * n as f64)).min(0.5);
    let periodic = model.geometry().is_torus();
    let mut factors = Vec::with_capacity(n);
    let mut activity = model.activity().clone();
    let mut chain_steps = 0;
    for k in 0..n {
        let geometry = if periodic {
            model.geometry().clone()
        } else {
            partition.remaining_box(k)
        };
        let sub = GibbsModel::new(geometry, model.potential().clone(), activity.clone())?;
        let cfg = BlockDynamicsConfig::for_model(
            &sub,
            options.radius.map(T::of),
            options.mixing_constant,
            chain_eps,
        )?;
        chain_steps = chain_steps.max(cfg.steps);
        let e = estimate_emptiness(&sub, &partition.cells()[k], samples, &cfg, &streams.fork(k as u64))?;
        if e.value == 0.0 {
            return Err(Error::ZeroProbability(format!("emptiness factor {k} was never observed")));
        }
        factors.push(e);
        activity = activity.excluding(partition.cells()[k].clone());
    }
    let value = -factors.iter().map(|e| e.value.ln()).sum::<f64>();
    let var: f64 = factors.iter().map(|e| (e.std_error / e.value).powi(2)).sum();
    let log_z = Estimate {
        value,
        std_error: var.sqrt(),
        n_samples: (samples * n) as u64,
        chain_steps,
        seed: streams.seed(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(CountingReport {
        log_z,
        factors,
        samples_per_factor: samples,
    })
}

/// Tuning of the density sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Trapezoid intervals per axis (even, so that the halved grid nests).
    pub intervals: usize,
    /// Chains per node.
    pub repetitions: usize,
    /// Chain total-variation target.
    pub epsilon: f64,
    pub mixing_constant: f64,
    pub radius: Option<f64>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            intervals: 16,
            repetitions: 800,
            epsilon: 0.01,
            mixing_constant: DEFAULT_MIXING_CONSTANT,
            radius: None,
        }
    }
}

/// Result of the density sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// `std_error` combines the statistical and quadrature errors.
    pub log_z: Estimate,
    pub statistical_error: f64,
    pub quadrature_error: f64,
    pub coarse_value: f64,
}

/// `log Z = int_Lambda rho_{lambda 1{y_1 >= x_1}}(x) dx` on a box with
/// constant activity, by a product trapezoid rule whose error is estimated
/// from the nested half-resolution rule.
pub fn logz_sweep<T: Real>(model: &GibbsModel<T>, options: &SweepOptions, streams: &Streams) -> Result<SweepReport> {
    let start = Instant::now();
    let Region::Box { lo, hi } = model.geometry() else {
        return Err(Error::InvalidRegion("the sweep needs a box geometry".into()));
    };
    let m = options.intervals;
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::param("intervals", "must be even and at least 2"));
    }
    let lambda = model.activity().bound();
    let dim = lo.dim();
    let nodes_per_axis = m + 1;
    let total_nodes = nodes_per_axis.pow(dim as u32);
    let mut node_estimates = Vec::with_capacity(total_nodes);
    let mut chain_steps = 0;
    for flat in 0..total_nodes {
        let idx = unflatten(flat, nodes_per_axis, dim);
        let x: Vec<T> = (0..dim)
            .map(|i| lo[i] + (hi[i] - lo[i]) * T::of(idx[i] as f64 / m as f64))
            .collect();
        let x = Point::new(&x);
        let e = if idx[0] == m || lambda == T::zero() {
            // nothing can sit to the right of the far face
            Estimate::exact(model.activity().value(&x).f64(), streams.seed())
        } else {
            let mut slo = lo.coords().to_vec();
            slo[0] = x[0];
            let geometry = Region::new_box(Point::new(&slo), hi.clone())?;
            let activity = model.activity().clone().restricted_to(geometry.clone());
            let sub = GibbsModel::new(geometry, model.potential().clone(), activity)?;
            let req = DensityRequest::new(sub, x, options.epsilon, options.mixing_constant, options.radius.map(T::of))?
                .with_repetitions(options.repetitions);
            chain_steps = chain_steps.max(req.chain.steps);
            estimate_density(&req, &streams.fork(flat as u64))?
        };
        node_estimates.push(e);
    }
    let widths: Vec<f64> = (0..dim).map(|i| (hi[i] - lo[i]).f64()).collect();
    let rule = |step: usize| {
        let mut value = 0.0;
        let mut var = 0.0;
        for (flat, e) in node_estimates.iter().enumerate() {
            let idx = unflatten(flat, nodes_per_axis, dim);
            if idx.iter().any(|&j| j % step != 0) {
                continue;
            }
            let mut w = 1.0;
            for i in 0..dim {
                let h = widths[i] * step as f64 / m as f64;
                w *= if idx[i] == 0 || idx[i] == m { h / 2.0 } else { h };
            }
            value += w * e.value;
            var += (w * e.std_error).powi(2);
        }
        (value, var.sqrt())
    };
    let (fine, stat) = rule(1);
    let (coarse, _) = rule(2);
    let quad = (fine - coarse).abs() / 3.0;
    Ok(SweepReport {
        log_z: Estimate {
            value: fine,
            std_error: stat.hypot(quad),
            n_samples: node_estimates.iter().map(|e| e.n_samples).sum(),
            chain_steps,
            seed: streams.seed(),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        statistical_error: stat,
        quadrature_error: quad,
        coarse_value: coarse,
    })
}

fn unflatten(mut flat: usize, n: usize, dim: usize) -> Vec<usize> {
    let mut idx = vec![0; dim];
    for i in (0..dim).rev() {
        idx[i] = flat % n;
        flat /= n;
    }
    idx
}

/// Quadrature budget of the series oracle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    /// Cranley-Patterson shifts per order; the spread of the shift means
    /// gives the error estimate.
    pub shifts: usize,
    pub points_per_shift: u64,
    pub max_order: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            shifts: 16,
            points_per_shift: 1 << 16,
            max_order: 12,
        }
    }
}

/// Oracle value of `log Z` with its error budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesOracle {
    pub log_z: f64,
    /// Quadrature error plus series tail bound.
    pub error: f64,
    pub order: usize,
    pub tail_bound: f64,
    pub nodes_per_order: u64,
}

/// `log Z` from the truncated series `sum_k 1/k! int prod lambda(x_i)
/// e^{-H}` with quasi-random (Kronecker) quadrature of each order.
pub fn series_log_partition_oracle<T: Real>(model: &GibbsModel<T>, tolerance: f64) -> Result<SeriesOracle> {
    series_log_partition_oracle_with(model, tolerance, &OracleOptions::default())
}

pub fn series_log_partition_oracle_with<T: Real>(
    model: &GibbsModel<T>,
    tolerance: f64,
    options: &OracleOptions,
) -> Result<SeriesOracle> {
    let lambda0 = model.activity().bound().f64();
    let (lo, hi) = model.proposal_box();
    let dim = model.dim();
    let widths: Vec<f64> = (0..dim).map(|i| (hi[i] - lo[i]).f64()).collect();
    let volume: f64 = if widths.iter().all(|&w| w > 0.0) {
        widths.iter().product()
    } else {
        0.0
    };
    let nodes = options.shifts as u64 * options.points_per_shift;
    let x = lambda0 * volume;
    if x == 0.0 {
        return Ok(SeriesOracle {
            log_z: 0.0,
            error: 0.0,
            order: 0,
            tail_bound: 0.0,
            nodes_per_order: nodes,
        });
    }
    // tail sum_{k > K} x^k / k! <= x^{K+1} / (K+1)! e^x
    let mut order = None;
    let mut term = x; // x^{K+1}/(K+1)! at K = 0
    for k in 0..=options.max_order {
        let tail = term * x.exp();
        if tail < tolerance / 2.0 {
            order = Some((k, tail));
            break;
        }
        term *= x / (k + 2) as f64;
    }
    let Some((order, tail)) = order else {
        return Err(Error::OracleTolerance {
            tolerance,
            max_order: options.max_order,
        });
    };
    let geometry = model.geometry();
    let activity = model.activity();
    let pot = model.potential();
    let lambda0_t = T::of(lambda0);
    let mut z = 1.0;
    let mut quad_err = 0.0;
    let mut scale = 1.0; // x^k / k!
    for k in 1..=order {
        scale *= x / k as f64;
        let seq = Kronecker::new(k * dim);
        let mut shift_rng = ChaCha8Rng::seed_from_u64(0x09AC_1E00 ^ k as u64);
        let shifts: Vec<Vec<f64>> = (0..options.shifts)
            .map(|_| (0..k * dim).map(|_| shift_rng.random::<f64>()).collect())
            .collect();
        let means: Vec<f64> = shifts
            .par_iter()
            .map(|shift| {
                let mut u = vec![0.0; k * dim];
                let mut pts: Vec<Point<T>> = Vec::with_capacity(k);
                let mut coords = vec![T::zero(); dim];
                let mut acc = 0.0;
                for n in 0..options.points_per_shift {
                    seq.point(n, shift, &mut u);
                    pts.clear();
                    let mut w = T::one();
                    for j in 0..k {
                        for i in 0..dim {
                            coords[i] = lo[i] + T::of(u[j * dim + i] * widths[i]);
                        }
                        let p = Point::new(&coords);
                        if !geometry.contains(&p) {
                            w = T::zero();
                            break;
                        }
                        w = w * activity.value(&p) / lambda0_t;
                        if w == T::zero() {
                            break;
                        }
                        pts.push(p);
                    }
                    if w == T::zero() {
                        continue;
                    }
                    let mut h = T::zero();
                    'pairs: for a in 0..k {
                        for b in 0..a {
                            h = h + pot.value_at(geometry.distance(&pts[a], &pts[b]));
                            if h == T::infinity() {
                                break 'pairs;
                            }
                        }
                    }
                    acc += (w * exp_neg(h)).f64();
                }
                acc / options.points_per_shift as f64
            })
            .collect();
        let m = means.iter().sum::<f64>() / means.len() as f64;
        let sd = if means.len() > 1 {
            (means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        z += scale * m;
        quad_err += scale * sd / (means.len() as f64).sqrt();
    }
    let error = quad_err / z + tail;
    if error > tolerance {
        return Err(Error::OracleTolerance {
            tolerance,
            max_order: options.max_order,
        });
    }
    Ok(SeriesOracle {
        log_z: z.ln(),
        error,
        order,
        tail_bound: tail,
        nodes_per_order: nodes,
    })
}

/// `log Z` of hard rods of length `r` on a segment of length `len`:
/// `Z = sum_k lambda^k max(0, len - (k-1) r)^k / k!`.
pub fn tonks_log_partition(len: f64, r: f64, lambda: f64) -> f64 {
    if lambda == 0.0 || len <= 0.0 {
        return 0.0;
    }
    let kmax = (len / r).floor() + 1.0;
    sum_log_terms(kmax, lambda * len, |k| {
        let free = len - (k - 1.0) * r;
        (free > 0.0).then(|| k * (lambda * free).ln() - ln_factorial(k))
    })
}

/// `log Z` of hard rods on a ring of circumference `n`:
/// `Z = 1 + sum_k lambda^k n max(0, n - k r)^{k-1} / k!`.
pub fn tonks_ring_log_partition(n: f64, r: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let kmax = (n / r).floor() + 1.0;
    sum_log_terms(kmax, lambda * n, |k| {
        let free = n - k * r;
        if k == 1.0 {
            Some((lambda * n).ln())
        } else {
            (free > 0.0).then(|| k * lambda.ln() + n.ln() + (k - 1.0) * free.ln() - ln_factorial(k))
        }
    })
}

/// `log(1 + sum_{k=1..kmax} exp(term(k)))`, stopping once the terms, which
/// decrease beyond `k ~ mode`, fall 40 e-folds below the largest.
fn sum_log_terms(kmax: f64, mode: f64, term: impl Fn(f64) -> Option<f64>) -> f64 {
    let mut v = vec![0.0];
    let mut best = 0.0f64;
    let mut k = 1.0;
    while k <= kmax {
        let Some(t) = term(k) else { break };
        best = best.max(t);
        v.push(t);
        if k > mode && t < best - 40.0 {
            break;
        }
        k += 1.0;
    }
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

fn ln_factorial(k: f64) -> f64 {
    let mut acc = 0.0;
    let mut j = 2.0;
    while j <= k {
        acc += f64::ln(j);
        j += 1.0;
    }
    acc
}

/// `log Z` of hard rods on a union of disjoint segments separated by gaps
/// of at least `r`, so that the segments do not interact.
pub fn tonks_union_log_partition(segments: &[(f64, f64)], r: f64, lambda: f64) -> Result<f64> {
    let mut s: Vec<(f64, f64)> = segments.iter().copied().filter(|(a, b)| b > a).collect();
    s.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for w in s.windows(2) {
        if w[1].0 - w[0].1 < r * (1.0 - 1e-12) {
            return Err(Error::param("segments", "segments closer than the rod length interact"));
        }
    }
    Ok(s.iter().map(|(a, b)| tonks_log_partition(b - a, r, lambda)).sum())
}

/// `[lo, hi]` minus the open intervals `(c - r, c + r)` around `centers`.
pub fn segments_excluding(lo: f64, hi: f64, centers: &[f64], r: f64) -> Vec<(f64, f64)> {
    let mut holes: Vec<(f64, f64)> = centers.iter().map(|&c| (c - r, c + r)).collect();
    holes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out = Vec::new();
    let mut cur = lo;
    for (a, b) in holes {
        if a > cur {
            out.push((cur, a.min(hi)));
        }
        cur = cur.max(b);
        if cur >= hi {
            break;
        }
    }
    if cur < hi {
        out.push((cur, hi));
    }
    out.retain(|(a, b)| b > a);
    out
}

/// Exact one-point density of hard rods on `[lo, hi]` at `v`, with extra
/// boundary rods fixed at `boundary` (each excludes `(y - r, y + r)`).
pub fn tonks_density(lo: f64, hi: f64, r: f64, lambda: f64, v: f64, boundary: &[f64]) -> Result<f64> {
    if v < lo || v > hi || boundary.iter().any(|y| (v - y).abs() < r) {
        return Ok(0.0);
    }
    let base = tonks_union_log_partition(&segments_excluding(lo, hi, boundary, r), r, lambda)?;
    let mut with_v = boundary.to_vec();
    with_v.push(v);
    let tilted = tonks_union_log_partition(&segments_excluding(lo, hi, &with_v, r), r, lambda)?;
    Ok(lambda * (tilted - base).exp())
}

/// Exact `mu(X cap [a, b] = empty)` for hard rods on `[lo, hi]`; requires
/// `b - a >= r`.
pub fn tonks_emptiness(lo: f64, hi: f64, r: f64, lambda: f64, a: f64, b: f64) -> Result<f64> {
    let rest = tonks_union_log_partition(&[(lo, a), (b, hi)], r, lambda)?;
    Ok((rest - tonks_log_partition(hi - lo, r, lambda)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activity::ActivityFunction;
    use crate::potential::PairPotential;
    use std::sync::Arc;

    fn rods(len: f64, r: f64, lambda: f64) -> GibbsModel<f64> {
        let g = Region::cube(1, 0.0, len).unwrap();
        let a = ActivityFunction::constant_on(g.clone(), lambda).unwrap();
        GibbsModel::new(g, Arc::new(PairPotential::hard_sphere(r).unwrap()), a).unwrap()
    }

    #[test]
    fn tonks_known_values() {
        // independently evaluated closed-form sums
        assert!((tonks_log_partition(2.0, 0.5, 1.0) - 1.457281769971872).abs() < 1e-12);
        assert!((tonks_log_partition(4.0, 0.5, 1.0) - 2.864215402156191).abs() < 1e-12);
        assert!((tonks_log_partition(3.0, 1e-9, 0.7) - 2.1).abs() < 1e-6);
        assert!((tonks_log_partition(0.4, 0.5, 2.0) - (1.8f64).ln()).abs() < 1e-14);
    }

    #[test]
    fn ring_small_circumference() {
        assert!((tonks_ring_log_partition(0.9, 0.5, 1.3) - (1.0 + 1.3 * 0.9f64).ln()).abs() < 1e-14);
        assert!((tonks_ring_log_partition(5.0, 1e-9, 0.4) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn partition_covers_box() {
        let p = UnitPartition::new(&Region::cube(2, 0.0, 2.0).unwrap()).unwrap();
        assert_eq!(p.len(), 4);
        let total: f64 = p.cells().iter().map(|c| c.volume().unwrap()).sum();
        assert!((total - 4.0).abs() < 1e-12);
        let q = UnitPartition::<f64>::new(&Region::new_box(Point::new(&[0.0, 0.0]), Point::new(&[2.5, 1.0])).unwrap()).unwrap();
        assert_eq!(q.len(), 3);
        assert!((q.cells()[2].volume().unwrap() - 0.5).abs() < 1e-12);
        assert!(UnitPartition::new(&Region::ball(Point::new(&[0.0]), 1.0).unwrap()).is_err());
    }

    #[test]
    fn zero_activity_counts_exactly() {
        let m = rods(2.0, 0.5, 0.0);
        let r = approx_log_partition(&m, 0.1, &CountingOptions::default(), &Streams::new(1)).unwrap();
        assert_eq!((r.log_z.value, r.log_z.std_error), (0.0, 0.0));
    }

    #[test]
    fn series_oracle_trivial_cases() {
        let m = rods(1.0, 0.5, 0.0);
        assert_eq!(series_log_partition_oracle(&m, 1e-4).unwrap().log_z, 0.0);
        let g = Region::cube(1, 0.0, 1.0).unwrap();
        let ideal = GibbsModel::new(
            g.clone(),
            Arc::new(PairPotential::ideal()),
            ActivityFunction::constant_on(g, 0.5).unwrap(),
        )
        .unwrap();
        let o = series_log_partition_oracle(&ideal, 1e-4).unwrap();
        assert!((o.log_z - 0.5).abs() < 1e-4, "{o:?}");
    }

    #[test]
    fn series_oracle_rejects_large_volume() {
        let m = rods(20.0, 0.5, 1.0);
        assert!(matches!(
            series_log_partition_oracle(&m, 1e-4),
            Err(Error::OracleTolerance { .. })
        ));
    }

    #[test]
    fn segments_and_densities() {
        let s = segments_excluding(0.0, 4.0, &[2.0], 0.5);
        assert_eq!(s, vec![(0.0, 1.5), (2.5, 4.0)]);
        let rho = tonks_density(0.0, 4.0, 0.5, 1.0, 2.0, &[]).unwrap();
        let expect = (2.0 * tonks_log_partition(1.5, 0.5, 1.0) - tonks_log_partition(4.0, 0.5, 1.0)).exp();
        assert!((rho - expect).abs() < 1e-14);
        assert_eq!(tonks_density(0.0, 4.0, 0.5, 1.0, 2.0, &[2.3]).unwrap(), 0.0);
        // density at a point of length-0 segment: lambda * Z(empty)/Z(empty)
        assert!((tonks_density(0.0, 0.0, 0.5, 1.0, 0.0, &[]).unwrap() - 1.0).abs() < 1e-15);
        assert!(tonks_union_log_partition(&[(0.0, 1.0), (1.2, 2.0)], 0.5, 1.0).is_err());
    }

    #[test]
    fn single_rod_emptiness() {
        // at most one rod on [0, 0.4] with r = 0.5: mu(empty) = 1 / (1 + lambda len)
        let e = tonks_emptiness(0.0, 3.0, 0.5, 1.0, 1.0, 2.0).unwrap();
        let z = tonks_log_partition(3.0, 0.5, 1.0);
        assert!((e - (2.0 * tonks_log_partition(1.0, 0.5, 1.0) - z).exp()).abs() < 1e-14);
    }
}
