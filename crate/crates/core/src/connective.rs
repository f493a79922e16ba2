//! Potential-weighted connective constant.
//!
//! `V_k = int prod_{j=1}^k exp(-sum_{i<=j-2} 1{|v_j - v_i| < |v_i - v_{i+1}|}
//! phi(v_j - v_i)) (1 - e^{-phi(v_j - v_{j-1})}) dv` with `v_0 = 0`, and
//! `Delta_phi = inf_k V_k^{1/k} <= C_phi`. Walks draw increments from
//! `(1 - e^{-phi}) / C_phi`, so `V_k = C_phi^k E[weight]`.

use std::f64::consts::E;
use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{mean_and_se, Estimate};
use crate::potential::PairPotential;
use crate::rng::Streams;
use crate::scalar::{exp_neg, Real};

const CHUNK: usize = 4096;

/// Radial law of one increment: shell `(r_{k-1}, r_k)` chosen with
/// probability proportional to its mass, radius by inverting `rho^d`.
struct IncrementLaw {
    dim: usize,
    shells: Vec<(f64, f64)>,
    cdf: Vec<f64>,
}

impl IncrementLaw {
    fn new(steps: &[(f64, f64)], dim: usize) -> Self {
        let mut shells = Vec::new();
        let mut cdf = Vec::new();
        let mut lo = 0.0f64;
        let mut total = 0.0;
        for &(hi, value) in steps {
            let mass = (1.0 - exp_neg(value)) * (hi.powi(dim as i32) - lo.powi(dim as i32));
            if mass > 0.0 {
                total += mass;
                shells.push((lo, hi));
                cdf.push(total);
            }
            lo = hi;
        }
        for c in &mut cdf {
            *c /= total;
        }
        IncrementLaw { dim, shells, cdf }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let u: f64 = rng.random();
        let k = self.cdf.partition_point(|&c| c < u).min(self.shells.len() - 1);
        let (lo, hi) = self.shells[k];
        let d = self.dim as i32;
        let rho = (lo.powi(d) + rng.random::<f64>() * (hi.powi(d) - lo.powi(d))).powf(1.0 / d as f64);
        loop {
            let mut n2 = 0.0;
            for x in out.iter_mut() {
                *x = StandardNormal.sample(rng);
                n2 += *x * *x;
            }
            if n2 > 0.0 {
                let s = rho / n2.sqrt();
                out.iter_mut().for_each(|x| *x *= s);
                return;
            }
        }
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Weight `prod_j exp(-sum_{i<=j-2} 1{|v_j - v_i| < |v_i - v_{i+1}|} phi(v_j - v_i))`
/// of one walk of `k` increments.
fn walk_weight<T: Real, R: Rng + ?Sized>(
    potential: &PairPotential<T>,
    law: &IncrementLaw,
    k: usize,
    rng: &mut R,
    walk: &mut Vec<f64>,
    step: &mut [f64],
) -> f64 {
    let d = law.dim;
    walk.clear();
    walk.resize(d, 0.0);
    let mut log_w = 0.0;
    for j in 1..=k {
        law.sample(rng, step);
        let prev = (j - 1) * d;
        for a in 0..d {
            let x = walk[prev + a] + step[a];
            walk.push(x);
        }
        let vj = &walk[j * d..(j + 1) * d];
        for i in 0..j.saturating_sub(1) {
            let vi = &walk[i * d..(i + 1) * d];
            let vi1 = &walk[(i + 1) * d..(i + 2) * d];
            let dji = dist(vj, vi);
            if dji < dist(vi, vi1) {
                log_w -= potential.value_at(T::of(dji)).f64();
            }
        }
        if log_w == f64::NEG_INFINITY {
            return 0.0;
        }
    }
    let w = log_w.exp();
    debug_assert!((0.0..=1.0).contains(&w));
    w
}

/// Importance-sampled `V_k` from `samples` walks.
pub fn estimate_vk<T: Real>(
    potential: &PairPotential<T>,
    dim: usize,
    k: usize,
    samples: usize,
    streams: &Streams,
) -> Result<Estimate> {
    if k == 0 {
        return Err(Error::param("k", "must be at least 1"));
    }
    if dim == 0 {
        return Err(Error::param("dim", "must be at least 1"));
    }
    if samples < 2 {
        return Err(Error::param("samples", "need at least two walks"));
    }
    let start = Instant::now();
    let c_phi = potential.temperedness(dim).c_phi;
    if c_phi == 0.0 {
        return Ok(Estimate::exact(0.0, streams.seed()));
    }
    if k == 1 {
        return Ok(Estimate {
            n_samples: samples as u64,
            ..Estimate::exact(c_phi, streams.seed())
        });
    }
    let scale = c_phi.powi(k as i32);
    if !scale.is_finite() || scale == 0.0 {
        return Err(Error::WeightUnderflow { k });
    }
    let steps: Vec<(f64, f64)> = potential
        .radial_steps()
        .into_iter()
        .map(|(r, v)| (r.f64(), v.f64()))
        .collect();
    let law = IncrementLaw::new(&steps, dim);
    let chunks = samples.div_ceil(CHUNK);
    let weights: Vec<f64> = (0..chunks as u64)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = streams.chain(c);
            let mut walk = Vec::with_capacity((k + 1) * dim);
            let mut step = vec![0.0; dim];
            let n = CHUNK.min(samples - c as usize * CHUNK);
            (0..n)
                .map(|_| walk_weight(potential, &law, k, &mut rng, &mut walk, &mut step))
                .collect::<Vec<_>>()
        })
        .collect();
    let (mean, se) = mean_and_se(&weights);
    if mean == 0.0 && weights.iter().all(|&w| w == 0.0) {
        // every walk was killed: the estimator has no resolution at this k
        return Err(Error::WeightUnderflow { k });
    }
    if mean > 0.0 && mean < f64::MIN_POSITIVE {
        return Err(Error::WeightUnderflow { k });
    }
    Ok(Estimate {
        value: scale * mean,
        std_error: scale * se,
        n_samples: samples as u64,
        chain_steps: k as u64,
        seed: streams.seed(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// `V_k` curve, its roots and the implied activity thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectiveReport {
    pub dim: usize,
    pub c_phi: f64,
    /// `V_k` for `k = 1..=k_max`.
    pub v: Vec<Estimate>,
    /// `V_k^{1/k}`.
    pub roots: Vec<f64>,
    /// `min_k V_k^{1/k}`: an upper-bound estimator of `Delta_phi`.
    pub delta_hat: f64,
    /// `V_k^{1/k}` at `k_max` over `C_phi`.
    pub last_ratio: f64,
    /// `e / delta_hat`.
    pub threshold: f64,
    /// `e / C_phi`.
    pub threshold_c_phi: f64,
}

impl ConnectiveReport {
    /// `V_k` with `V_0 = 1`.
    pub fn v_k(&self, k: usize) -> Option<f64> {
        if k == 0 {
            Some(1.0)
        } else {
            self.v.get(k - 1).map(|e| e.value)
        }
    }
}

/// Estimates `V_1..V_{k_max}` with independent streams per `k`.
pub fn connective_report<T: Real>(
    potential: &PairPotential<T>,
    dim: usize,
    k_max: usize,
    samples: usize,
    streams: &Streams,
) -> Result<ConnectiveReport> {
    if k_max < 2 {
        return Err(Error::param("k_max", "must be at least 2"));
    }
    let c_phi = potential.temperedness(dim).c_phi;
    if c_phi == 0.0 {
        return Err(Error::param("potential", "trivial potential has no connective constant"));
    }
    let v = (1..=k_max)
        .map(|k| estimate_vk(potential, dim, k, samples, &streams.fork(k as u64)))
        .collect::<Result<Vec<_>>>()?;
    let roots: Vec<f64> = v
        .iter()
        .enumerate()
        .map(|(i, e)| e.value.max(0.0).powf(1.0 / (i + 1) as f64))
        .collect();
    let delta_hat = roots.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ConnectiveReport {
        dim,
        c_phi,
        last_ratio: roots[k_max - 1] / c_phi,
        threshold: E / delta_hat,
        threshold_c_phi: E / c_phi,
        delta_hat,
        roots,
        v,
    })
}
