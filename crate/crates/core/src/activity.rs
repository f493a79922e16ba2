//! Activity functions: bounded intensities built symbolically from region
//! masks, point tilts and a global scale, so that bounds and support
//! separations can be computed exactly from the structure.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Region};
use crate::potential::PairPotential;
use crate::scalar::{exp_neg, Real};

/// Indicator factor of an activity.
#[derive(Clone, Debug, PartialEq)]
pub enum Mask<T> {
    Inside(Region<T>),
    Outside(Region<T>),
}

impl<T: Real> Mask<T> {
    #[inline]
    fn admits(&self, x: &Point<T>) -> bool {
        match self {
            Mask::Inside(r) => r.contains(x),
            Mask::Outside(r) => !r.contains(x),
        }
    }
}

/// Multiplicative Boltzmann factor attached to an activity.
#[derive(Clone, Debug, PartialEq)]
pub enum Tilt<T> {
    /// `x -> e^{-phi(x - at)}`.
    Point {
        at: Point<T>,
        potential: Arc<PairPotential<T>>,
    },
    /// `x -> e^{-phi(v - x)}` when `|v - x| < |v - w|`, else `1`.
    Recursion {
        v: Point<T>,
        w: Point<T>,
        potential: Arc<PairPotential<T>>,
    },
}

/// A `lambda`-bounded activity function
/// `x -> scale * lambda * prod(masks) * prod(tilts)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ActivityFunction<T> {
    dim: usize,
    lambda: T,
    scale: T,
    masks: Vec<Mask<T>>,
    tilts: Vec<Tilt<T>>,
    metric: Option<Region<T>>,
}

impl<T: Real> ActivityFunction<T> {
    /// Constant `lambda` on all of `R^d`.
    pub fn constant(dim: usize, lambda: T) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidActivity("dimension must be at least 1".into()));
        }
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidActivity(
                "lambda must be finite and nonnegative".into(),
            ));
        }
        Ok(ActivityFunction {
            dim,
            lambda,
            scale: T::one(),
            masks: Vec::new(),
            tilts: Vec::new(),
            metric: None,
        })
    }

    /// `lambda * 1{x in region}`.
    pub fn constant_on(region: Region<T>, lambda: T) -> Result<Self> {
        Ok(Self::constant(region.dim(), lambda)?.restricted_to(region))
    }

    /// `lambda * 1{<u, x> >= 0}`.
    pub fn half_space(direction: Point<T>, lambda: T) -> Result<Self> {
        let dim = direction.dim();
        Ok(Self::constant(dim, lambda)?.restricted_to(Region::half_space(direction, T::zero())?))
    }

    /// `lambda * 1{<u, x> in [0, width]}`.
    pub fn slab(direction: Point<T>, width: T, lambda: T) -> Result<Self> {
        let dim = direction.dim();
        Ok(Self::constant(dim, lambda)?.restricted_to(Region::slab(direction, T::zero(), width)?))
    }

    /// `lambda * 1{<u, x> >= 0, <v, x> >= 0}`.
    pub fn quadrant(u: Point<T>, v: Point<T>, lambda: T) -> Result<Self> {
        v.check_dim(u.dim())?;
        let dim = u.dim();
        Ok(Self::constant(dim, lambda)?
            .restricted_to(Region::half_space(u, T::zero())?)
            .restricted_to(Region::half_space(v, T::zero())?))
    }

    /// The recursion activity `base_{v -> w}`.
    pub fn recursion_tilt(
        &self,
        v: Point<T>,
        w: Point<T>,
        potential: Arc<PairPotential<T>>,
    ) -> Result<Self> {
        v.check_dim(self.dim)?;
        w.check_dim(self.dim)?;
        let mut out = self.clone();
        out.tilts.push(Tilt::Recursion { v, w, potential });
        Ok(out)
    }

    pub fn restricted_to(mut self, region: Region<T>) -> Self {
        self.masks.push(Mask::Inside(region));
        self
    }

    pub fn excluding(mut self, region: Region<T>) -> Self {
        self.masks.push(Mask::Outside(region));
        self
    }

    /// Multiplies the whole function by `t` (kept separate from `lambda`).
    pub fn scaled(&self, t: T) -> Result<Self> {
        if !(t >= T::zero()) || t > T::one() {
            return Err(Error::param("t", "interpolation scale must lie in [0, 1]"));
        }
        let mut out = self.clone();
        out.scale = out.scale * t;
        Ok(out)
    }

    /// Distances used by tilts follow `metric` (e.g. the torus of a model).
    pub fn with_metric(mut self, metric: Region<T>) -> Self {
        self.metric = Some(metric);
        self
    }

    /// `x -> value(x) * prod_j e^{-phi(x - y_j)}`.
    pub fn tilt_by_points(&self, points: &[Point<T>], potential: &Arc<PairPotential<T>>) -> Result<Self> {
        let mut out = self.clone();
        for p in points {
            p.check_dim(self.dim)?;
            out.tilts.push(Tilt::Point {
                at: p.clone(),
                potential: Arc::clone(potential),
            });
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Upper bound `scale * lambda` on the function.
    pub fn bound(&self) -> T {
        self.scale * self.lambda
    }

    pub fn base_lambda(&self) -> T {
        self.lambda
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn masks(&self) -> &[Mask<T>] {
        &self.masks
    }

    pub fn tilts(&self) -> &[Tilt<T>] {
        &self.tilts
    }

    #[inline]
    fn dist(&self, a: &Point<T>, b: &Point<T>) -> T {
        match &self.metric {
            Some(m) => m.distance(a, b),
            None => (a - b).norm(),
        }
    }

    /// Indicator part only: whether every mask admits `x`.
    #[inline]
    pub fn admits(&self, x: &Point<T>) -> bool {
        self.masks.iter().all(|m| m.admits(x))
    }

    /// Product of the tilt factors at `x`, in `[0, 1]`.
    pub fn tilt_factor(&self, x: &Point<T>) -> T {
        let mut f = T::one();
        for tilt in &self.tilts {
            let factor = match tilt {
                Tilt::Point { at, potential } => potential.boltzmann_at(self.dist(x, at)),
                Tilt::Recursion { v, w, potential } => {
                    let dvx = self.dist(v, x);
                    if dvx < self.dist(v, w) {
                        exp_neg(potential.value_at(dvx))
                    } else {
                        T::one()
                    }
                }
            };
            f = f * factor;
            if f == T::zero() {
                break;
            }
        }
        f
    }

    /// Activity at `x`.
    pub fn value(&self, x: &Point<T>) -> T {
        let b = self.bound();
        if b == T::zero() || !self.admits(x) {
            return T::zero();
        }
        b * self.tilt_factor(x)
    }

    /// Conservative axis-aligned bounding box of the support, `None` when the
    /// masks do not bound it.
    pub fn support_box(&self) -> Option<(Point<T>, Point<T>)> {
        let mut lo = Point::<T>::new(&vec![T::neg_infinity(); self.dim]);
        let mut hi = Point::<T>::new(&vec![T::infinity(); self.dim]);
        let mut lo_v: Vec<T> = lo.coords().to_vec();
        let mut hi_v: Vec<T> = hi.coords().to_vec();
        for m in &self.masks {
            let Mask::Inside(region) = m else { continue };
            match region {
                Region::HalfSpace { normal, offset } => {
                    if let Some((axis, sign)) = axis_direction(normal) {
                        if sign > T::zero() {
                            lo_v[axis] = lo_v[axis].max(*offset);
                        } else {
                            hi_v[axis] = hi_v[axis].min(-*offset);
                        }
                    }
                }
                Region::Slab { normal, lo: a, hi: b } => {
                    if let Some((axis, sign)) = axis_direction(normal) {
                        let (x0, x1) = if sign > T::zero() { (*a, *b) } else { (-*b, -*a) };
                        lo_v[axis] = lo_v[axis].max(x0);
                        hi_v[axis] = hi_v[axis].min(x1);
                    }
                }
                Region::Torus { .. } => {}
                _ => {
                    if let Some((a, b)) = region.bounding_box() {
                        for i in 0..self.dim {
                            lo_v[i] = lo_v[i].max(a[i]);
                            hi_v[i] = hi_v[i].min(b[i]);
                        }
                    }
                }
            }
        }
        if lo_v.iter().chain(&hi_v).any(|c| !c.is_finite()) {
            return None;
        }
        lo = Point::new(&lo_v);
        hi = Point::new(&hi_v);
        Some((lo, hi))
    }
}

fn axis_direction<T: Real>(u: &Point<T>) -> Option<(usize, T)> {
    let mut found = None;
    for (i, &c) in u.coords().iter().enumerate() {
        if c != T::zero() {
            if found.is_some() {
                return None;
            }
            found = Some((i, c.signum()));
        }
    }
    found
}

fn multiset_difference<'a, X: PartialEq>(a: &'a [X], b: &[X]) -> Vec<&'a X> {
    let mut used = vec![false; b.len()];
    let mut out = Vec::new();
    'outer: for x in a {
        for (j, y) in b.iter().enumerate() {
            if !used[j] && x == y {
                used[j] = true;
                continue 'outer;
            }
        }
        out.push(x);
    }
    out
}

/// Lower bound on `dist(target, supp(a - b))` derived from the structure of
/// the two functions; `+inf` when they are structurally identical.
pub fn support_separation<T: Real>(
    a: &ActivityFunction<T>,
    b: &ActivityFunction<T>,
    target: &Region<T>,
) -> Result<T> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: b.dim,
        });
    }
    target.check_dim_of(a.dim)?;
    let (lo, hi) = target.bounding_box().ok_or(Error::UnboundedRegion)?;
    let zero = T::zero();
    if a.metric != b.metric || a.metric.as_ref().is_some_and(Region::is_torus) {
        return Ok(if a == b { T::infinity() } else { zero });
    }
    if a.bound() != b.bound() {
        // the functions may differ anywhere on either support
        let mut best = T::infinity();
        for f in [a, b] {
            match f.support_box() {
                Some((slo, shi)) if f.bound() > zero => {
                    let sup = Region::Box { lo: slo, hi: shi };
                    best = best.min(sup.distance_from_box(&lo, &hi));
                }
                Some(_) => {}
                None if f.bound() > zero => return Ok(zero),
                None => {}
            }
        }
        return Ok(best);
    }
    let mut best = T::infinity();
    let masks = multiset_difference(&a.masks, &b.masks)
        .into_iter()
        .chain(multiset_difference(&b.masks, &a.masks));
    for m in masks {
        let d = match m {
            Mask::Inside(r) => r.distance_from_box_to_complement(&lo, &hi),
            Mask::Outside(r) => r.distance_from_box(&lo, &hi),
        };
        best = best.min(d);
    }
    let tilts = multiset_difference(&a.tilts, &b.tilts)
        .into_iter()
        .chain(multiset_difference(&b.tilts, &a.tilts));
    for t in tilts {
        let (center, radius) = match t {
            Tilt::Point { at, potential } => (at, potential.range()),
            Tilt::Recursion { v, w, potential } => (v, potential.range().min((v - w).norm())),
        };
        let d = if radius > zero {
            Region::Ball {
                center: center.clone(),
                radius,
            }
            .distance_from_box(&lo, &hi)
        } else {
            T::infinity()
        };
        best = best.min(d);
    }
    Ok(best)
}

impl<T: Real> Region<T> {
    fn check_dim_of(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            })
        }
    }
}

/// Shape of an activity in configuration files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActivityKind {
    /// `lambda` on the model region.
    Constant,
    /// `lambda * 1{<direction, x> >= offsets[0]}`.
    HalfSpace,
    /// `lambda * 1{offsets[0] <= <direction, x> <= offsets[1]}`.
    Slab,
    /// `lambda * 1{<direction, x> >= 0, <second_direction, x> >= 0}`.
    Quadrant,
    /// Recursion tilt with `tilt_points = [v, w]`.
    RecursionTilt,
}

/// Structured description of an activity: `{kind, lambda, direction,
/// offsets, tilt_points}`. Tilt points other than the recursion pair are
/// applied as plain point tilts. Every activity is restricted to the model
/// region when built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActivitySpec {
    pub kind: ActivityKind,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub direction: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub second_direction: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub offsets: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tilt_points: Vec<Vec<f64>>,
}

impl ActivitySpec {
    pub fn constant(lambda: f64) -> Self {
        ActivitySpec {
            kind: ActivityKind::Constant,
            lambda,
            direction: Vec::new(),
            second_direction: Vec::new(),
            offsets: Vec::new(),
            tilt_points: Vec::new(),
        }
    }

    pub fn build<T: Real>(
        &self,
        region: &Region<T>,
        potential: &Arc<PairPotential<T>>,
    ) -> Result<ActivityFunction<T>> {
        let dim = region.dim();
        if self.lambda < 0.0 || !self.lambda.is_finite() {
            return Err(Error::InvalidActivity(format!(
                "lambda must be finite and nonnegative, got {}",
                self.lambda
            )));
        }
        let lambda = T::of(self.lambda);
        let vector = |name: &'static str, v: &[f64]| -> Result<Point<T>> {
            if v.len() != dim {
                return Err(Error::InvalidActivity(format!(
                    "`{name}` must have {dim} components"
                )));
            }
            let p = Point::<T>::from_f64(v);
            if (p.norm().f64() - 1.0f64).abs() > 1e-5 {
                return Err(Error::InvalidActivity(format!("`{name}` must be a unit vector")));
            }
            Ok(p)
        };
        let offset = |i: usize, default: f64| T::of(self.offsets.get(i).copied().unwrap_or(default));
        let base = ActivityFunction::constant(dim, lambda)?;
        let mut f = match self.kind {
            ActivityKind::Constant => base,
            ActivityKind::HalfSpace => {
                base.restricted_to(Region::half_space(vector("direction", &self.direction)?, offset(0, 0.0))?)
            }
            ActivityKind::Slab => {
                if self.offsets.len() != 2 {
                    return Err(Error::InvalidActivity("slab needs offsets [lo, hi]".into()));
                }
                base.restricted_to(Region::slab(
                    vector("direction", &self.direction)?,
                    offset(0, 0.0),
                    offset(1, 0.0),
                )?)
            }
            ActivityKind::Quadrant => ActivityFunction::quadrant(
                vector("direction", &self.direction)?,
                vector("second_direction", &self.second_direction)?,
                lambda,
            )?,
            ActivityKind::RecursionTilt => base,
        };
        f = f.restricted_to(region.clone());
        if region.is_torus() {
            f = f.with_metric(region.clone());
        }
        let mut points: Vec<Point<T>> = Vec::new();
        for p in &self.tilt_points {
            if p.len() != dim {
                return Err(Error::InvalidActivity(format!(
                    "tilt point {p:?} must have {dim} components"
                )));
            }
            points.push(Point::from_f64(p));
        }
        if self.kind == ActivityKind::RecursionTilt {
            if points.len() != 2 {
                return Err(Error::InvalidActivity(
                    "recursion-tilt needs tilt_points = [v, w]".into(),
                ));
            }
            let w = points.pop().unwrap();
            let v = points.pop().unwrap();
            f = f.recursion_tilt(v, w, Arc::clone(potential))?;
        }
        f.tilt_by_points(&points, potential)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(c: &[f64]) -> Point<f64> {
        Point::new(c)
    }

    fn hs(r: f64) -> Arc<PairPotential<f64>> {
        Arc::new(PairPotential::hard_sphere(r).unwrap())
    }

    #[test]
    fn constant_on_region_is_an_indicator() {
        let f = ActivityFunction::constant_on(Region::cube(2, 0.0, 1.0).unwrap(), 1.0).unwrap();
        assert_eq!(f.value(&p(&[0.5, 0.5])), 1.0);
        assert_eq!(f.value(&p(&[2.0, 2.0])), 0.0);
    }

    #[test]
    fn half_space_masks_negative_side() {
        let f = ActivityFunction::half_space(p(&[1.0, 0.0]), 2.0).unwrap();
        assert_eq!(f.value(&p(&[-0.1, 5.0])), 0.0);
        assert_eq!(f.value(&p(&[0.0, 5.0])), 2.0);
    }

    #[test]
    fn slab_and_quadrant() {
        let s = ActivityFunction::slab(p(&[1.0]), 2.0, 1.5).unwrap();
        assert_eq!(s.value(&p(&[1.0])), 1.5);
        assert_eq!(s.value(&p(&[2.5])), 0.0);
        let q = ActivityFunction::quadrant(p(&[1.0, 0.0]), p(&[0.0, 1.0]), 1.0).unwrap();
        assert_eq!(q.value(&p(&[0.5, 0.5])), 1.0);
        assert_eq!(q.value(&p(&[0.5, -0.5])), 0.0);
    }

    #[test]
    fn construct_rejects_bad_input() {
        assert!(ActivityFunction::constant(2, -1.0).is_err());
        assert!(ActivityFunction::half_space(p(&[1.0, 1.0]), 1.0).is_err());
        let spec = ActivitySpec { lambda: -0.5, ..ActivitySpec::constant(1.0) };
        let region = Region::cube(1, 0.0, 1.0).unwrap();
        assert!(spec.build(&region, &hs(0.5)).is_err());
    }

    #[test]
    fn recursion_tilt_zeroes_inside_min_radius() {
        let base = ActivityFunction::constant(1, 1.0).unwrap();
        let (v, w) = (p(&[0.0]), p(&[0.6]));
        let f = base.recursion_tilt(v.clone(), w, hs(1.0)).unwrap();
        assert_eq!(f.value(&p(&[0.3])), 0.0);
        assert_eq!(f.value(&p(&[-0.59])), 0.0);
        assert_eq!(f.value(&p(&[0.7])), 1.0);
        // w = v: nothing is tilted
        let same = base.recursion_tilt(v.clone(), v.clone(), hs(1.0)).unwrap();
        assert_eq!(same.value(&p(&[0.1])), 1.0);
        // |v - w| >= r: plain tilt by v
        let far = base.recursion_tilt(v.clone(), p(&[3.0]), hs(1.0)).unwrap();
        let plain = base.tilt_by_points(&[v], &hs(1.0)).unwrap();
        for i in 0..200 {
            let x = p(&[-2.0 + 0.02 * i as f64]);
            assert_eq!(far.value(&x), plain.value(&x));
        }
    }

    #[test]
    fn tilts() {
        let base = ActivityFunction::constant(2, 1.3).unwrap();
        assert_eq!(base.tilt_by_points(&[], &hs(1.0)).unwrap(), base);
        let f = base.tilt_by_points(&[p(&[0.0, 0.0])], &hs(1.0)).unwrap();
        assert_eq!(f.value(&p(&[0.5, 0.5])), 0.0);
        assert_eq!(f.value(&p(&[1.0, 0.5])), 1.3);

        let a = 0.7;
        let strauss = Arc::new(PairPotential::strauss(1.0, a).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ys: Vec<_> = (0..6)
            .map(|_| p(&[rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]))
            .collect();
        let g = base.tilt_by_points(&ys, &strauss).unwrap();
        for _ in 0..100 {
            let x = p(&[rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]);
            let near = ys.iter().filter(|y| (&x - y).norm() < 1.0).count();
            let expect = 1.3 * (-a * near as f64).exp();
            assert!((g.value(&x) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn tilting_is_monotone_and_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pot = Arc::new(PairPotential::tabulated(vec![(0.4, 3.0), (1.0, 0.5)]).unwrap());
        let base = ActivityFunction::constant_on(Region::cube(2, -3.0, 3.0).unwrap(), 0.8).unwrap();
        let ys: Vec<_> = (0..5)
            .map(|_| p(&[rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]))
            .collect();
        let once = base.tilt_by_points(&ys, &pot).unwrap();
        let twice = base
            .tilt_by_points(&ys[..2], &pot)
            .unwrap()
            .tilt_by_points(&ys[2..], &pot)
            .unwrap();
        for _ in 0..500 {
            let x = p(&[rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)]);
            assert!(once.value(&x) <= base.value(&x));
            assert_eq!(once.value(&x), twice.value(&x));
        }
    }

    #[test]
    fn values_never_exceed_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pot = hs(0.5);
        let fs = vec![
            ActivityFunction::constant_on(Region::cube(2, 0.0, 1.0).unwrap(), 1.0).unwrap(),
            ActivityFunction::half_space(p(&[0.0, 1.0]), 2.0).unwrap(),
            ActivityFunction::slab(p(&[1.0, 0.0]), 1.0, 0.5).unwrap(),
            ActivityFunction::quadrant(p(&[1.0, 0.0]), p(&[0.0, -1.0]), 3.0).unwrap().scaled(0.25).unwrap(),
            ActivityFunction::constant(2, 1.0)
                .unwrap()
                .recursion_tilt(p(&[0.0, 0.0]), p(&[0.3, 0.0]), pot.clone())
                .unwrap(),
        ];
        for f in &fs {
            for _ in 0..10_000 {
                let x = p(&[rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]);
                let v = f.value(&x);
                assert!(v >= 0.0 && v <= f.bound());
            }
        }
    }

    #[test]
    fn support_separation_examples() {
        let unit = Region::cube(1, 0.0, 1.0).unwrap();
        let a = ActivityFunction::constant_on(unit.clone(), 1.0).unwrap();
        assert_eq!(support_separation(&a, &a.clone(), &unit).unwrap(), f64::INFINITY);

        let b = a.tilt_by_points(&[p(&[3.0])], &hs(0.5)).unwrap();
        assert_eq!(support_separation(&a, &b, &unit).unwrap(), 1.5);

        let c = a.clone().excluding(Region::cube(1, 5.0, 6.0).unwrap());
        assert_eq!(support_separation(&a, &c, &unit).unwrap(), 4.0);
        assert_eq!(support_separation(&c, &a, &unit).unwrap(), 4.0);

        // differing levels: separation is the distance to the supports
        let far = ActivityFunction::constant_on(Region::cube(1, 4.0, 5.0).unwrap(), 1.0).unwrap();
        let far2 = ActivityFunction::constant_on(Region::cube(1, 4.0, 5.0).unwrap(), 2.0).unwrap();
        assert_eq!(support_separation(&far, &far2, &unit).unwrap(), 3.0);

        // unbounded difference support is reported conservatively
        let h1 = ActivityFunction::half_space(p(&[1.0]), 1.0).unwrap();
        let h2 = ActivityFunction::half_space(p(&[1.0]), 2.0).unwrap();
        assert_eq!(support_separation(&h1, &h2, &unit).unwrap(), 0.0);
    }

    #[test]
    fn support_box_uses_axis_half_spaces() {
        let f = ActivityFunction::quadrant(p(&[1.0, 0.0]), p(&[0.0, 1.0]), 1.0)
            .unwrap()
            .restricted_to(Region::ball(p(&[0.0, 2.0]), 3.0).unwrap());
        let (lo, hi) = f.support_box().unwrap();
        assert_eq!(lo, p(&[0.0, 0.0]));
        assert_eq!(hi, p(&[3.0, 5.0]));
        assert!(ActivityFunction::half_space(p(&[1.0]), 1.0).unwrap().support_box().is_none());
    }

    #[test]
    fn spec_round_trip_through_build() {
        let region = Region::cube(2, -2.0, 2.0).unwrap();
        let spec = ActivitySpec {
            kind: ActivityKind::Quadrant,
            lambda: 0.5,
            direction: vec![1.0, 0.0],
            second_direction: vec![0.0, 1.0],
            offsets: vec![],
            tilt_points: vec![vec![1.0, 1.0]],
        };
        let f = spec.build(&region, &hs(0.5)).unwrap();
        assert_eq!(f.value(&p(&[0.1, 0.1])), 0.5);
        assert_eq!(f.value(&p(&[1.1, 1.0])), 0.0);
        assert_eq!(f.value(&p(&[-0.1, 0.1])), 0.0);
        assert_eq!(f.value(&p(&[1.9, 0.1])), 0.5);
    }
}
