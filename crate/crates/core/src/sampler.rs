//! Poisson sampling by thinning and the radius-`L` block dynamics.
//!
//! A block update picks `y` uniformly in the geometry, deletes the points in
//! `B_L(y)`, and redraws them by acceptance-rejection: a Poisson proposal `Y`
//! on `B_L(y)` is accepted with probability `e^{-H}`, where `H` counts the
//! interactions inside `Y` and between `Y` and the points left outside.

use std::io::{self, Write};
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::activity::ActivityFunction;
use crate::error::{Error, Result};
use crate::geometry::{uniform_in_box, CellIndex, Point, Region};
use crate::potential::PairPotential;
use crate::rng::Streams;
use crate::scalar::Real;

/// Consecutive rejected proposals tolerated by a single block update.
pub const REJECTION_LIMIT: u64 = 1_000_000;

/// Default mixing constant `C` in `T = C N log(N / eps)`.
pub const DEFAULT_MIXING_CONSTANT: f64 = 10.0;

/// A Gibbs point process: geometry, pair potential and activity.
#[derive(Clone, Debug)]
pub struct GibbsModel<T> {
    geometry: Region<T>,
    potential: Arc<PairPotential<T>>,
    activity: ActivityFunction<T>,
    proposal: (Point<T>, Point<T>),
}

impl<T: Real> GibbsModel<T> {
    /// The geometry must be bounded; the activity is effectively restricted
    /// to it. On a torus the activity's tilts adopt the periodic metric.
    pub fn new(
        geometry: Region<T>,
        potential: Arc<PairPotential<T>>,
        activity: ActivityFunction<T>,
    ) -> Result<Self> {
        if activity.dim() != geometry.dim() {
            return Err(Error::DimensionMismatch {
                expected: geometry.dim(),
                got: activity.dim(),
            });
        }
        if !geometry.is_bounded() {
            return Err(Error::UnboundedRegion);
        }
        if !activity.bound().is_finite() {
            return Err(Error::InvalidActivity("activity bound must be finite".into()));
        }
        let activity = if geometry.is_torus() {
            activity.with_metric(geometry.clone())
        } else {
            activity
        };
        let proposal = proposal_box(&geometry, &activity);
        Ok(GibbsModel {
            geometry,
            potential,
            activity,
            proposal,
        })
    }

    /// Same geometry and potential with a different activity.
    pub fn with_activity(&self, activity: ActivityFunction<T>) -> Result<Self> {
        Self::new(self.geometry.clone(), Arc::clone(&self.potential), activity)
    }

    pub fn geometry(&self) -> &Region<T> {
        &self.geometry
    }

    pub fn potential(&self) -> &Arc<PairPotential<T>> {
        &self.potential
    }

    pub fn activity(&self) -> &ActivityFunction<T> {
        &self.activity
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    pub fn volume(&self) -> T {
        self.geometry.volume().expect("model geometry is bounded")
    }

    /// Proposal box for the whole model: the geometry's bounding box clipped
    /// to the activity support.
    pub fn proposal_box(&self) -> (Point<T>, Point<T>) {
        self.proposal.clone()
    }
}

fn proposal_box<T: Real>(geometry: &Region<T>, activity: &ActivityFunction<T>) -> (Point<T>, Point<T>) {
    let (mut lo, mut hi) = geometry.bounding_box().expect("bounded");
    if !geometry.is_torus() {
        if let Some((a, b)) = activity.support_box() {
            lo = Point::new(&lo.coords().iter().zip(a.coords()).map(|(&x, &y)| x.max(y)).collect::<Vec<_>>());
            hi = Point::new(&hi.coords().iter().zip(b.coords()).map(|(&x, &y)| x.min(y)).collect::<Vec<_>>());
        }
    }
    (lo, hi)
}

/// Parameters of a block-dynamics run.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDynamicsConfig<T> {
    /// Update radius `L`.
    pub radius: T,
    /// Number of block updates `T`.
    pub steps: u64,
    /// Mixing constant `C` used to derive `steps` (metadata).
    pub mixing_constant: f64,
    /// Target total-variation distance `eps` used to derive `steps` (metadata).
    pub epsilon: f64,
}

/// `T = ceil(C N log(N / eps))` with `N = max(volume, 1)`.
pub fn mixing_steps(volume: f64, c: f64, epsilon: f64) -> u64 {
    let n = volume.max(1.0);
    (c * n * (n / epsilon).ln()).ceil().max(1.0) as u64
}

impl<T: Real> BlockDynamicsConfig<T> {
    /// Explicit radius and step count.
    pub fn new(radius: T, steps: u64) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::param("L", "update radius must be positive and finite"));
        }
        if steps == 0 {
            return Err(Error::param("T", "step count must be at least 1"));
        }
        Ok(BlockDynamicsConfig {
            radius,
            steps,
            mixing_constant: f64::NAN,
            epsilon: f64::NAN,
        })
    }

    /// Radius `L` (default `2r`) and `T = ceil(C N log(N / eps))` for the
    /// model's volume `N`.
    pub fn for_model(model: &GibbsModel<T>, radius: Option<T>, c: f64, epsilon: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::param("C", "mixing constant must be positive"));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::param("epsilon", "must lie in (0, 1)"));
        }
        let radius = radius.unwrap_or_else(|| T::of(2.0) * model.potential().range());
        let mut cfg = Self::new(radius, mixing_steps(model.volume().f64(), c, epsilon))?;
        cfg.mixing_constant = c;
        cfg.epsilon = epsilon;
        cfg.validate(model)?;
        Ok(cfg)
    }

    pub fn validate(&self, model: &GibbsModel<T>) -> Result<()> {
        if self.radius < model.potential().range() && !model.potential().is_trivial() {
            return Err(Error::param("L", "update radius must be at least the potential range"));
        }
        if self.steps == 0 {
            return Err(Error::param("T", "step count must be at least 1"));
        }
        Ok(())
    }
}

/// Configuration of one chain together with its neighbour index.
#[derive(Clone, Debug)]
pub struct ChainState<T> {
    index: CellIndex<T>,
    steps: u64,
    proposal: Vec<Point<T>>,
}

impl<T: Real> ChainState<T> {
    /// The empty configuration.
    pub fn empty(model: &GibbsModel<T>) -> Result<Self> {
        let cell = model.potential().range();
        Ok(ChainState {
            index: CellIndex::new(model.geometry().clone(), cell)?,
            steps: 0,
            proposal: Vec::new(),
        })
    }

    /// A given configuration; fails if it has zero Gibbs weight.
    pub fn from_points(model: &GibbsModel<T>, points: &[Point<T>]) -> Result<Self> {
        let mut state = Self::empty(model)?;
        for p in points {
            state.index.insert(p.clone())?;
        }
        if !state.index.is_empty() && !state_energy(model, &state.index).is_finite() {
            return Err(Error::param("points", "configuration has infinite energy"));
        }
        Ok(state)
    }

    pub fn index(&self) -> &CellIndex<T> {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn points(&self) -> Vec<Point<T>> {
        self.index.iter().cloned().collect()
    }
}

fn state_energy<T: Real>(model: &GibbsModel<T>, index: &CellIndex<T>) -> T {
    let pot = model.potential();
    let mut h = T::zero();
    for p in index.iter() {
        index.for_each_within(p, pot.range(), |q, d| {
            if !std::ptr::eq(p, q) {
                h = h + pot.value_at(d);
            }
        });
    }
    h / T::of(2.0)
}

/// Draw from `Poisson(mean)`; zero mean gives zero.
pub fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

/// Inhomogeneous Poisson process with intensity `activity` on a bounded
/// region: a homogeneous draw at the bound `lambda0` on a box covering the
/// region, thinned with keep probability `activity(x) / lambda0`.
pub fn sample_poisson<T: Real, R: Rng + ?Sized>(
    activity: &ActivityFunction<T>,
    region: &Region<T>,
    rng: &mut R,
) -> Result<Vec<Point<T>>> {
    if activity.dim() != region.dim() {
        return Err(Error::DimensionMismatch {
            expected: region.dim(),
            got: activity.dim(),
        });
    }
    let (mut lo, mut hi) = region.bounding_box().ok_or(Error::UnboundedRegion)?;
    if !region.is_torus() {
        if let Some((a, b)) = activity.support_box() {
            lo = Point::new(&lo.coords().iter().zip(a.coords()).map(|(&x, &y)| x.max(y)).collect::<Vec<_>>());
            hi = Point::new(&hi.coords().iter().zip(b.coords()).map(|(&x, &y)| x.min(y)).collect::<Vec<_>>());
        }
    }
    let mut out = Vec::new();
    let lambda0 = activity.bound();
    let Some(vol) = box_volume(&lo, &hi) else {
        return Ok(out);
    };
    let n = poisson_count(lambda0.f64() * vol, rng);
    for _ in 0..n {
        let x = uniform_in_box(&lo, &hi, rng);
        if region.contains(&x) && T::of(rng.random::<f64>()) * lambda0 < activity.value(&x) {
            out.push(region.canonicalize(&x));
        }
    }
    Ok(out)
}

fn box_volume<T: Real>(lo: &Point<T>, hi: &Point<T>) -> Option<f64> {
    let mut v = 1.0;
    for i in 0..lo.dim() {
        let w = (hi[i] - lo[i]).f64();
        if !(w > 0.0) {
            return None;
        }
        v *= w;
    }
    Some(v)
}

/// One block update of `state`.
pub fn block_update<T: Real, R: Rng + ?Sized>(
    state: &mut ChainState<T>,
    model: &GibbsModel<T>,
    cfg: &BlockDynamicsConfig<T>,
    rng: &mut R,
) -> Result<()> {
    let geometry = model.geometry();
    let activity = model.activity();
    let pot = model.potential();
    let radius = cfg.radius;
    let y = geometry.sample_uniform(rng)?;
    state.index.remove_within(&y, radius);
    state.steps += 1;

    let lambda0 = activity.bound();
    if lambda0 == T::zero() {
        return Ok(());
    }
    // proposal box covering B_L(y) within the geometry and the support
    let (glo, ghi) = &model.proposal;
    let torus_half = match geometry {
        Region::Torus { side, .. } => Some(*side / T::of(2.0)),
        _ => None,
    };
    let mut lo_v: SmallVec<[T; 4]> = SmallVec::with_capacity(y.dim());
    let mut hi_v: SmallVec<[T; 4]> = SmallVec::with_capacity(y.dim());
    for i in 0..y.dim() {
        match torus_half {
            Some(half) => {
                let reach = radius.min(half);
                lo_v.push(y[i] - reach);
                hi_v.push(y[i] + reach);
            }
            None => {
                lo_v.push((y[i] - radius).max(glo[i]));
                hi_v.push((y[i] + radius).min(ghi[i]));
            }
        }
    }
    let lo = Point::new(&lo_v);
    let hi = Point::new(&hi_v);
    let Some(vol) = box_volume(&lo, &hi) else {
        return Ok(());
    };
    let mean = lambda0.f64() * vol;
    let r2 = radius * radius;
    let trivial = pot.is_trivial();
    let range = pot.range();

    let mut proposal = std::mem::take(&mut state.proposal);
    let mut attempts = 0u64;
    loop {
        proposal.clear();
        let n = poisson_count(mean, rng);
        for _ in 0..n {
            let raw = uniform_in_box(&lo, &hi, rng);
            let x = geometry.canonicalize(&raw);
            if geometry.distance_sq(&y, &x) >= r2 || !geometry.contains(&x) {
                continue;
            }
            if T::of(rng.random::<f64>()) * lambda0 < activity.value(&x) {
                proposal.push(x);
            }
        }
        if trivial || proposal.is_empty() || accept(&proposal, &state.index, geometry, pot, range, rng) {
            break;
        }
        attempts += 1;
        if attempts >= REJECTION_LIMIT {
            state.proposal = proposal;
            return Err(Error::RejectionLimit {
                step: state.steps,
                attempts,
            });
        }
    }
    for x in proposal.drain(..) {
        state.index.insert(x)?;
    }
    state.proposal = proposal;
    Ok(())
}

/// Accepts with probability `e^{-H}`, stopping as soon as the partial energy
/// exceeds the exponential threshold `-ln U`.
fn accept<T: Real, R: Rng + ?Sized>(
    proposal: &[Point<T>],
    index: &CellIndex<T>,
    geometry: &Region<T>,
    pot: &PairPotential<T>,
    range: T,
    rng: &mut R,
) -> bool {
    let u: f64 = rng.random();
    let threshold = T::of(-(1.0 - u).ln());
    let range2 = range * range;
    let mut h = T::zero();
    for (i, x) in proposal.iter().enumerate() {
        for z in &proposal[..i] {
            let d2 = geometry.distance_sq(x, z);
            if d2 < range2 {
                h = h + pot.value_at(d2.sqrt());
            }
        }
        if h > threshold {
            return false;
        }
        index.for_each_within(x, range, |_, d| h = h + pot.value_at(d));
        if h > threshold {
            return false;
        }
    }
    true
}

/// `cfg.steps` block updates from the empty configuration.
pub fn run_chain<T: Real, R: Rng + ?Sized>(
    model: &GibbsModel<T>,
    cfg: &BlockDynamicsConfig<T>,
    rng: &mut R,
) -> Result<ChainState<T>> {
    cfg.validate(model)?;
    let mut state = ChainState::empty(model)?;
    for _ in 0..cfg.steps {
        block_update(&mut state, model, cfg, rng)?;
    }
    Ok(state)
}

/// Runs `f` on `n` independent streams in parallel; results keep index order.
pub fn par_chains<R, F>(n: usize, streams: &Streams, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<R> + Sync + Send,
{
    (0..n as u64)
        .into_par_iter()
        .map(|i| f(&mut streams.chain(i)))
        .collect()
}

/// Writes configurations as CSV with header `chain,point,x0,...,x{d-1}`.
pub fn write_configurations_csv<T: Real, W: Write>(
    out: &mut W,
    dim: usize,
    chains: &[Vec<Point<T>>],
) -> io::Result<()> {
    let mut header = String::from("chain,point");
    for i in 0..dim {
        header.push_str(&format!(",x{i}"));
    }
    writeln!(out, "{header}")?;
    for (c, points) in chains.iter().enumerate() {
        for (k, p) in points.iter().enumerate() {
            write!(out, "{c},{k}")?;
            for x in p.coords() {
                write!(out, ",{}", x.f64())?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rods(len: f64, r: f64, lambda: f64) -> GibbsModel<f64> {
        let g = Region::cube(1, 0.0, len).unwrap();
        let a = ActivityFunction::constant_on(g.clone(), lambda).unwrap();
        GibbsModel::new(g, Arc::new(PairPotential::hard_sphere(r).unwrap()), a).unwrap()
    }

    fn ideal(dim: usize, side: f64, lambda: f64) -> GibbsModel<f64> {
        let g = Region::cube(dim, 0.0, side).unwrap();
        let a = ActivityFunction::constant_on(g.clone(), lambda).unwrap();
        GibbsModel::new(g, Arc::new(PairPotential::ideal()), a).unwrap()
    }

    #[test]
    fn poisson_zero_bound_is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = ActivityFunction::constant(2, 0.0).unwrap();
        let pts = sample_poisson(&a, &Region::cube(2, 0.0, 1.0).unwrap(), &mut rng).unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn poisson_mean_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let region = Region::cube(2, 0.0, 1.0).unwrap();
        let a = ActivityFunction::constant(2, 2.0).unwrap();
        let n = 10_000;
        let total: usize = (0..n)
            .map(|_| sample_poisson(&a, &region, &mut rng).unwrap().len())
            .sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 2.0).abs() < 3.0 * (2.0f64 / n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn poisson_respects_masks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let region = Region::cube(2, -1.0, 1.0).unwrap();
        let a = ActivityFunction::half_space(Point::new(&[1.0, 0.0]), 3.0).unwrap();
        for _ in 0..10_000 {
            for p in sample_poisson(&a, &region, &mut rng).unwrap() {
                assert!(p[0] >= 0.0);
            }
        }
        assert!(sample_poisson(&a, &Region::half_space(Point::new(&[1.0, 0.0]), 0.0).unwrap(), &mut rng).is_err());
    }

    #[test]
    fn hard_core_is_preserved_by_every_update() {
        let g = Region::cube(2, 0.0, 6.0).unwrap();
        let a = ActivityFunction::constant_on(g.clone(), 0.4).unwrap();
        let r = 1.0;
        let model = GibbsModel::new(g, Arc::new(PairPotential::hard_sphere(r).unwrap()), a).unwrap();
        let cfg = BlockDynamicsConfig::new(2.0, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut state = ChainState::empty(&model).unwrap();
        for _ in 0..100_000 {
            block_update(&mut state, &model, &cfg, &mut rng).unwrap();
            for p in state.index().iter() {
                assert!(state.index().neighbor_query(p, r).unwrap().len() == 1);
            }
        }
        assert!(state.len() > 5);
    }

    #[test]
    fn ideal_update_reproduces_poisson_ball_statistics() {
        // with H = 0 the contents of B_L(y) are a fresh Poisson draw
        let model = ideal(1, 10.0, 1.5);
        let cfg = BlockDynamicsConfig::new(1.0, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut state = ChainState::empty(&model).unwrap();
        for _ in 0..2000 {
            block_update(&mut state, &model, &cfg, &mut rng).unwrap();
        }
        let probe = Point::new(&[5.0]);
        let (mut s, mut n) = (0.0, 0);
        for _ in 0..20_000 {
            block_update(&mut state, &model, &cfg, &mut rng).unwrap();
            let mut c = 0;
            state.index().for_each_within(&probe, 1.0, |_, _| c += 1);
            s += c as f64;
            n += 1;
        }
        // mean count in a ball of length 2 is 3; samples are correlated, so loose
        assert!((s / n as f64 - 3.0).abs() < 0.25, "{}", s / n as f64);
    }

    #[test]
    fn ideal_chain_count_is_poisson() {
        // chi-square on the final counts of independent ideal-gas chains
        let model = ideal(2, 2.0, 1.0);
        let cfg = BlockDynamicsConfig::for_model(&model, None, 10.0, 0.01).unwrap();
        let streams = Streams::new(11);
        let counts = par_chains(2000, &streams, |rng| Ok(run_chain(&model, &cfg, rng)?.len())).unwrap();
        let mean = 4.0f64;
        let pmf = |k: usize| (-mean).exp() * mean.powi(k as i32) / (1..=k).map(|j| j as f64).product::<f64>();
        // bins 0..=1, 2, ..., 7, >= 8
        let mut obs = [0usize; 8];
        for &c in &counts {
            obs[c.clamp(1, 8) - 1] += 1;
        }
        let mut exp = [0.0; 8];
        exp[0] = pmf(0) + pmf(1);
        for k in 2..8 {
            exp[k - 1] = pmf(k);
        }
        exp[7] = 1.0 - exp[..7].iter().sum::<f64>();
        let chi2: f64 = obs
            .iter()
            .zip(&exp)
            .map(|(&o, &e)| (o as f64 - 2000.0 * e).powi(2) / (2000.0 * e))
            .sum();
        // 7 degrees of freedom, 1% critical value
        assert!(chi2 < 18.48, "chi2 = {chi2}");
    }

    #[test]
    fn lumped_transitions_are_symmetric() {
        // hard rods of diameter 0.6 on [0, 1]: class = occupancy of the halves
        let model = rods(1.0, 0.6, 1.5);
        let cfg = BlockDynamicsConfig::new(0.6, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut state = ChainState::empty(&model).unwrap();
        let class = |s: &ChainState<f64>| {
            let mut c = 0;
            for p in s.index().iter() {
                c |= if p[0] < 0.5 { 1 } else { 2 };
            }
            c
        };
        for _ in 0..1000 {
            block_update(&mut state, &model, &cfg, &mut rng).unwrap();
        }
        let mut counts = [[0u64; 4]; 4];
        let mut prev = class(&state);
        for _ in 0..400_000 {
            block_update(&mut state, &model, &cfg, &mut rng).unwrap();
            let cur = class(&state);
            counts[prev][cur] += 1;
            prev = cur;
        }
        for (a, row) in counts.iter().enumerate() {
            for (b, col) in counts.iter().enumerate().skip(a + 1) {
                let (x, y) = (row[b] as f64, col[a] as f64);
                if x + y > 0.0 {
                    let z = (x - y) / (x + y).sqrt();
                    assert!(z.abs() < 4.0, "{a}->{b}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn torus_updates_wrap() {
        let g = Region::torus(1, 3.0).unwrap();
        let a = ActivityFunction::constant(1, 2.0).unwrap();
        let model = GibbsModel::new(g, Arc::new(PairPotential::hard_sphere(0.5).unwrap()), a).unwrap();
        let cfg = BlockDynamicsConfig::new(1.0, 5000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let state = run_chain(&model, &cfg, &mut rng).unwrap();
        let pts = state.points();
        for p in &pts {
            assert!(p[0] >= 0.0 && p[0] < 3.0);
        }
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[..i] {
                assert!(model.geometry().distance(p, q) >= 0.5);
            }
        }
    }

    #[test]
    fn chains_are_deterministic() {
        let model = rods(4.0, 0.5, 1.0);
        let cfg = BlockDynamicsConfig::for_model(&model, None, 10.0, 0.05).unwrap();
        let streams = Streams::new(1);
        let a = par_chains(8, &streams, |rng| Ok(run_chain(&model, &cfg, rng)?.points())).unwrap();
        let b = par_chains(8, &streams, |rng| Ok(run_chain(&model, &cfg, rng)?.points())).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        let model = rods(4.0, 0.5, 1.0);
        assert!(BlockDynamicsConfig::for_model(&model, Some(0.2), 10.0, 0.1).is_err());
        assert!(BlockDynamicsConfig::for_model(&model, None, 10.0, 1.5).is_err());
        let cfg = BlockDynamicsConfig::for_model(&model, None, 10.0, 0.1).unwrap();
        assert_eq!(cfg.radius, 1.0);
        assert_eq!(cfg.steps, (10.0f64 * 4.0 * 40.0f64.ln()).ceil() as u64);
        assert!(BlockDynamicsConfig::<f64>::new(1.0, 0).is_err());
    }

    #[test]
    fn from_points_rejects_overlaps() {
        let model = rods(4.0, 0.5, 1.0);
        assert!(ChainState::from_points(&model, &[Point::new(&[1.0]), Point::new(&[1.2])]).is_err());
        assert!(ChainState::from_points(&model, &[Point::new(&[1.0]), Point::new(&[1.6])]).is_ok());
    }

    #[test]
    fn csv_dump_format() {
        let mut buf = Vec::new();
        let chains = vec![vec![Point::new(&[0.5, 1.0])], vec![]];
        write_configurations_csv(&mut buf, 2, &chains).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "chain,point,x0,x1\n0,0,0.5,1\n");
    }
}
