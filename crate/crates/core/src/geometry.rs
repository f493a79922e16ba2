//! Regions of `R^d`, the flat torus, and a cell-list index for finite-range
//! neighbour queries.

use std::ops::{Index, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::{rem_euclid, Real};

/// A point (or displacement vector) in `R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point<T>(SmallVec<[T; 4]>);

impl<T: Real> Point<T> {
    pub fn new(coords: &[T]) -> Self {
        Point(SmallVec::from_slice(coords))
    }

    pub fn from_f64(coords: &[f64]) -> Self {
        Point(coords.iter().map(|&c| T::of(c)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Point(SmallVec::from_elem(T::zero(), dim))
    }

    /// `scale * e_axis` in dimension `dim`.
    pub fn axis(dim: usize, axis: usize, scale: T) -> Self {
        let mut p = Self::zeros(dim);
        p.0[axis] = scale;
        p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn coords(&self) -> &[T] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.f64()).collect()
    }

    pub fn dot(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn add_scaled(&self, other: &Self, scale: T) -> Self {
        Point(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(&a, &b)| a + scale * b)
                .collect(),
        )
    }

    pub fn scaled(&self, scale: T) -> Self {
        Point(self.0.iter().map(|&a| a * scale).collect())
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
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

impl<T> Index<usize> for Point<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T: Real> Sub for &Point<T> {
    type Output = Point<T>;
    fn sub(self, rhs: &Point<T>) -> Point<T> {
        Point(
            self.0
                .iter()
                .zip(rhs.0.iter())
                .map(|(&a, &b)| a - b)
                .collect(),
        )
    }
}

/// Volume of the unit ball in dimension `dim`, `pi^{d/2} / Gamma(d/2 + 1)`,
/// evaluated through the two-step recursion `V_d = 2 pi V_{d-2} / d`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let (mut v, mut d) = if dim.is_multiple_of(2) { (1.0, 0) } else { (2.0, 1) };
    while d < dim {
        d += 2;
        v *= two_pi / d as f64;
    }
    v
}

/// Volume of a `dim`-ball of the given radius.
pub fn ball_volume<T: Real>(dim: usize, radius: T) -> T {
    T::of(unit_ball_volume(dim)) * radius.powi(dim as i32)
}

const UNIT_TOL: f64 = 1e-5;

fn check_unit<T: Real>(v: &Point<T>) -> Result<()> {
    if (v.norm().f64() - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidRegion(format!(
            "direction {:?} is not a unit vector",
            v.to_f64()
        )));
    }
    Ok(())
}

/// A region of `R^d` or a flat torus `R^d / (n Z)^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region<T> {
    /// Axis-aligned box `prod_i [lo_i, hi_i]`.
    Box { lo: Point<T>, hi: Point<T> },
    Ball { center: Point<T>, radius: T },
    /// `{x : <normal, x> >= offset}`.
    HalfSpace { normal: Point<T>, offset: T },
    /// `{x : lo <= <normal, x> <= hi}`.
    Slab { normal: Point<T>, lo: T, hi: T },
    /// Torus of side `side`, canonical coordinates in `[0, side)`.
    Torus { dim: usize, side: T },
}

impl<T: Real> Region<T> {
    pub fn new_box(lo: Point<T>, hi: Point<T>) -> Result<Self> {
        if lo.dim() == 0 {
            return Err(Error::InvalidRegion("dimension must be at least 1".into()));
        }
        hi.check_dim(lo.dim())?;
        if lo.coords().iter().zip(hi.coords()).any(|(&a, &b)| !(b > a)) {
            return Err(Error::InvalidRegion(
                "box side lengths must be positive".into(),
            ));
        }
        Ok(Region::Box { lo, hi })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: T, hi: T) -> Result<Self> {
        Self::new_box(
            Point(SmallVec::from_elem(lo, dim)),
            Point(SmallVec::from_elem(hi, dim)),
        )
    }

    pub fn ball(center: Point<T>, radius: T) -> Result<Self> {
        if center.dim() == 0 {
            return Err(Error::InvalidRegion("dimension must be at least 1".into()));
        }
        if !(radius > T::zero()) {
            return Err(Error::InvalidRegion("ball radius must be positive".into()));
        }
        Ok(Region::Ball { center, radius })
    }

    pub fn half_space(normal: Point<T>, offset: T) -> Result<Self> {
        check_unit(&normal)?;
        Ok(Region::HalfSpace { normal, offset })
    }

    pub fn slab(normal: Point<T>, lo: T, hi: T) -> Result<Self> {
        check_unit(&normal)?;
        if hi < lo {
            return Err(Error::InvalidRegion("slab interval is reversed".into()));
        }
        Ok(Region::Slab { normal, lo, hi })
    }

    pub fn torus(dim: usize, side: T) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidRegion("dimension must be at least 1".into()));
        }
        if !(side > T::zero()) {
            return Err(Error::InvalidRegion("torus side must be positive".into()));
        }
        Ok(Region::Torus { dim, side })
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Box { lo, .. } => lo.dim(),
            Region::Ball { center, .. } => center.dim(),
            Region::HalfSpace { normal, .. } | Region::Slab { normal, .. } => normal.dim(),
            Region::Torus { dim, .. } => *dim,
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Region::HalfSpace { .. } | Region::Slab { .. })
    }

    pub fn is_torus(&self) -> bool {
        matches!(self, Region::Torus { .. })
    }

    /// Lebesgue measure of the region.
    pub fn volume(&self) -> Result<T> {
        match self {
            Region::Box { lo, hi } => Ok(lo
                .coords()
                .iter()
                .zip(hi.coords())
                .fold(T::one(), |acc, (&a, &b)| acc * (b - a))),
            Region::Ball { center, radius } => Ok(ball_volume(center.dim(), *radius)),
            Region::Torus { dim, side } => Ok(side.powi(*dim as i32)),
            Region::HalfSpace { .. } | Region::Slab { .. } => Err(Error::UnboundedRegion),
        }
    }

    pub fn contains(&self, p: &Point<T>) -> bool {
        if p.dim() != self.dim() {
            return false;
        }
        match self {
            Region::Box { lo, hi } => p
                .coords()
                .iter()
                .zip(lo.coords().iter().zip(hi.coords()))
                .all(|(&x, (&a, &b))| x >= a && x <= b),
            Region::Ball { center, radius } => (p - center).norm_sq() <= *radius * *radius,
            Region::HalfSpace { normal, offset } => normal.dot(p) >= *offset,
            Region::Slab { normal, lo, hi } => {
                let s = normal.dot(p);
                s >= *lo && s <= *hi
            }
            Region::Torus { .. } => true,
        }
    }

    /// Canonical representative: torus coordinates folded into `[0, side)`.
    pub fn canonicalize(&self, p: &Point<T>) -> Point<T> {
        match self {
            Region::Torus { side, .. } => Point(
                p.coords()
                    .iter()
                    .map(|&x| {
                        let y = rem_euclid(x, *side);
                        // rem_euclid can round up to `side` for tiny negative inputs
                        if y >= *side {
                            T::zero()
                        } else {
                            y
                        }
                    })
                    .collect(),
            ),
            _ => p.clone(),
        }
    }

    #[inline]
    fn fold(&self, delta: T) -> T {
        match self {
            Region::Torus { side, .. } => {
                let half = *side / T::of(2.0);
                let d = rem_euclid(delta + half, *side) - half;
                if d >= half {
                    d - *side
                } else {
                    d
                }
            }
            _ => delta,
        }
    }

    /// Displacement `q - p`; minimum image on the torus, each coordinate in
    /// `[-side/2, side/2)`.
    pub fn displacement(&self, p: &Point<T>, q: &Point<T>) -> Result<Point<T>> {
        p.check_dim(self.dim())?;
        q.check_dim(self.dim())?;
        Ok(Point(
            p.coords()
                .iter()
                .zip(q.coords())
                .map(|(&a, &b)| self.fold(b - a))
                .collect(),
        ))
    }

    /// Squared distance under the region's metric; no dimension checks.
    #[inline]
    pub fn distance_sq(&self, p: &Point<T>, q: &Point<T>) -> T {
        p.coords()
            .iter()
            .zip(q.coords())
            .fold(T::zero(), |acc, (&a, &b)| {
                let d = self.fold(b - a);
                acc + d * d
            })
    }

    #[inline]
    pub fn distance(&self, p: &Point<T>, q: &Point<T>) -> T {
        self.distance_sq(p, q).sqrt()
    }

    /// Axis-aligned bounding box `(lo, hi)`, `None` when unbounded.
    pub fn bounding_box(&self) -> Option<(Point<T>, Point<T>)> {
        match self {
            Region::Box { lo, hi } => Some((lo.clone(), hi.clone())),
            Region::Ball { center, radius } => Some((
                Point(center.coords().iter().map(|&c| c - *radius).collect()),
                Point(center.coords().iter().map(|&c| c + *radius).collect()),
            )),
            Region::Torus { dim, side } => Some((
                Point::zeros(*dim),
                Point(SmallVec::from_elem(*side, *dim)),
            )),
            Region::HalfSpace { .. } | Region::Slab { .. } => None,
        }
    }

    /// Uniform point of a bounded region.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Point<T>> {
        let (lo, hi) = self.bounding_box().ok_or(Error::UnboundedRegion)?;
        loop {
            let p = uniform_in_box(&lo, &hi, rng);
            if self.contains(&p) {
                return Ok(self.canonicalize(&p));
            }
        }
    }

    /// Lower bound on `dist(box, self)` for the box `[lo, hi]`.
    pub(crate) fn distance_from_box(&self, lo: &Point<T>, hi: &Point<T>) -> T {
        let zero = T::zero();
        match self {
            Region::Box { lo: a, hi: b } => {
                let mut acc = zero;
                for i in 0..lo.dim() {
                    let gap = (a[i] - hi[i]).max(lo[i] - b[i]).max(zero);
                    acc = acc + gap * gap;
                }
                acc.sqrt()
            }
            Region::Ball { center, radius } => {
                (box_point_distance(lo, hi, center) - *radius).max(zero)
            }
            Region::HalfSpace { normal, offset } => {
                (*offset - box_support_max(lo, hi, normal)).max(zero)
            }
            Region::Slab {
                normal,
                lo: s_lo,
                hi: s_hi,
            } => {
                let max = box_support_max(lo, hi, normal);
                let min = box_support_min(lo, hi, normal);
                (*s_lo - max).max(min - *s_hi).max(zero)
            }
            Region::Torus { .. } => zero,
        }
    }

    /// Lower bound on `dist(box, complement of self)` for the box `[lo, hi]`.
    pub(crate) fn distance_from_box_to_complement(&self, lo: &Point<T>, hi: &Point<T>) -> T {
        let zero = T::zero();
        match self {
            Region::Box { lo: a, hi: b } => {
                let mut best = T::infinity();
                for i in 0..lo.dim() {
                    best = best.min(lo[i] - a[i]).min(b[i] - hi[i]);
                }
                best.max(zero)
            }
            Region::Ball { center, radius } => {
                // farthest box corner from the centre
                let mut acc = zero;
                for i in 0..lo.dim() {
                    let d = (lo[i] - center[i]).abs().max((hi[i] - center[i]).abs());
                    acc = acc + d * d;
                }
                (*radius - acc.sqrt()).max(zero)
            }
            Region::HalfSpace { normal, offset } => {
                (box_support_min(lo, hi, normal) - *offset).max(zero)
            }
            Region::Slab {
                normal,
                lo: s_lo,
                hi: s_hi,
            } => {
                let max = box_support_max(lo, hi, normal);
                let min = box_support_min(lo, hi, normal);
                (min - *s_lo).min(*s_hi - max).max(zero)
            }
            Region::Torus { .. } => T::infinity(),
        }
    }
}

pub(crate) fn uniform_in_box<T: Real, R: Rng + ?Sized>(
    lo: &Point<T>,
    hi: &Point<T>,
    rng: &mut R,
) -> Point<T> {
    Point(
        lo.coords()
            .iter()
            .zip(hi.coords())
            .map(|(&a, &b)| a + (b - a) * T::of(rng.random::<f64>()))
            .collect(),
    )
}

fn box_point_distance<T: Real>(lo: &Point<T>, hi: &Point<T>, p: &Point<T>) -> T {
    let mut acc = T::zero();
    for i in 0..lo.dim() {
        let gap = (lo[i] - p[i]).max(p[i] - hi[i]).max(T::zero());
        acc = acc + gap * gap;
    }
    acc.sqrt()
}

fn box_support_max<T: Real>(lo: &Point<T>, hi: &Point<T>, u: &Point<T>) -> T {
    (0..lo.dim()).fold(T::zero(), |acc, i| acc + (u[i] * lo[i]).max(u[i] * hi[i]))
}

fn box_support_min<T: Real>(lo: &Point<T>, hi: &Point<T>, u: &Point<T>) -> T {
    (0..lo.dim()).fold(T::zero(), |acc, i| acc + (u[i] * lo[i]).min(u[i] * hi[i]))
}

/// Cell-list index over a bounded region. Points are stored in their cells,
/// so the index doubles as the configuration container of a chain.
#[derive(Clone, Debug)]
pub struct CellIndex<T> {
    geometry: Region<T>,
    cell_size: T,
    origin: Point<T>,
    width: SmallVec<[T; 4]>,
    counts: SmallVec<[usize; 4]>,
    cells: Vec<Vec<Point<T>>>,
    len: usize,
}

impl<T: Real> CellIndex<T> {
    /// Builds an empty index with cells at least `cell_size` wide.
    pub fn new(geometry: Region<T>, cell_size: T) -> Result<Self> {
        if !(cell_size > T::zero()) {
            return Err(Error::param("cell_size", "must be positive"));
        }
        let (lo, hi) = geometry.bounding_box().ok_or(Error::UnboundedRegion)?;
        let mut width = SmallVec::new();
        let mut counts = SmallVec::new();
        for i in 0..lo.dim() {
            let extent = hi[i] - lo[i];
            let n = (extent / cell_size).floor().to_usize().unwrap_or(1).clamp(1, 1 << 20);
            counts.push(n);
            width.push(extent / T::of(n as f64));
        }
        let total: usize = counts.iter().product();
        if total > 1 << 24 {
            return Err(Error::param("cell_size", "too many cells for the region"));
        }
        Ok(CellIndex {
            geometry,
            cell_size,
            origin: lo,
            width,
            counts,
            cells: vec![Vec::new(); total],
            len: 0,
        })
    }

    pub fn geometry(&self) -> &Region<T> {
        &self.geometry
    }

    pub fn cell_size(&self) -> T {
        self.cell_size
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn clear(&mut self) {
        self.cells.iter_mut().for_each(Vec::clear);
        self.len = 0;
    }

    fn axis_cell(&self, axis: usize, x: T) -> isize {
        ((x - self.origin[axis]) / self.width[axis])
            .floor()
            .to_isize()
            .unwrap_or(0)
    }

    fn flat(&self, cell: &[usize]) -> usize {
        cell.iter()
            .zip(self.counts.iter())
            .fold(0, |acc, (&c, &n)| acc * n + c)
    }

    /// Inserts a point (canonicalised on the torus).
    pub fn insert(&mut self, p: Point<T>) -> Result<()> {
        p.check_dim(self.geometry.dim())?;
        let p = self.geometry.canonicalize(&p);
        let mut cell: SmallVec<[usize; 4]> = SmallVec::new();
        for i in 0..p.dim() {
            let c = self.axis_cell(i, p[i]);
            let n = self.counts[i] as isize;
            // a coordinate sitting exactly on the upper face belongs to the last cell
            let slack = self.width[i] * T::of(1e-9);
            if c < 0 || c >= n {
                let on_face = (c == n && p[i] <= self.origin[i] + self.width[i] * T::of(n as f64) + slack)
                    || (c == -1 && p[i] >= self.origin[i] - slack);
                if !on_face {
                    return Err(Error::OutsideIndex);
                }
            }
            cell.push(c.clamp(0, n - 1) as usize);
        }
        let k = self.flat(&cell);
        self.cells[k].push(p);
        self.len += 1;
        Ok(())
    }

    /// Per-axis ranges (possibly wrapped) of cells intersecting the ball.
    fn axis_ranges(&self, center: &Point<T>, radius: T) -> SmallVec<[SmallVec<[usize; 8]>; 4]> {
        let periodic = self.geometry.is_torus();
        let mut ranges = SmallVec::new();
        for i in 0..center.dim() {
            let n = self.counts[i] as isize;
            let mut axis: SmallVec<[usize; 8]> = SmallVec::new();
            if periodic {
                let c = self.axis_cell(i, center[i]);
                let k = (radius / self.width[i]).ceil().to_isize().unwrap_or(n);
                if 2 * k + 1 >= n {
                    axis.extend(0..n as usize);
                } else {
                    axis.extend((c - k..=c + k).map(|j| j.rem_euclid(n) as usize));
                }
            } else {
                let a = self.axis_cell(i, center[i] - radius).max(0);
                let b = self.axis_cell(i, center[i] + radius).min(n - 1);
                if a <= b {
                    axis.extend(a as usize..=b as usize);
                }
            }
            ranges.push(axis);
        }
        ranges
    }

    fn visit_cells(&self, center: &Point<T>, radius: T, mut f: impl FnMut(usize)) {
        let ranges = self.axis_ranges(center, radius);
        if ranges.iter().any(|r| r.is_empty()) {
            return;
        }
        let d = ranges.len();
        let mut pos: SmallVec<[usize; 4]> = SmallVec::from_elem(0, d);
        let mut cell: SmallVec<[usize; 4]> = SmallVec::from_elem(0, d);
        loop {
            for i in 0..d {
                cell[i] = ranges[i][pos[i]];
            }
            f(self.flat(&cell));
            let mut i = d;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                pos[i] += 1;
                if pos[i] < ranges[i].len() {
                    break;
                }
                pos[i] = 0;
            }
        }
    }

    /// Calls `f(point, distance)` for every indexed point strictly within
    /// `radius` of `center`. Works for any radius.
    pub fn for_each_within(&self, center: &Point<T>, radius: T, mut f: impl FnMut(&Point<T>, T)) {
        let r2 = radius * radius;
        self.visit_cells(center, radius, |k| {
            for p in &self.cells[k] {
                let d2 = self.geometry.distance_sq(center, p);
                if d2 < r2 {
                    f(p, d2.sqrt());
                }
            }
        });
    }

    /// Indexed points within `radius` of `center`, where `radius` may not
    /// exceed the cell size.
    pub fn neighbor_query(&self, center: &Point<T>, radius: T) -> Result<Vec<&Point<T>>> {
        center.check_dim(self.geometry.dim())?;
        if radius > self.cell_size {
            return Err(Error::RadiusExceedsCell {
                radius: radius.f64(),
                cell: self.cell_size.f64(),
            });
        }
        let r2 = radius * radius;
        let mut out = Vec::new();
        self.visit_cells(center, radius, |k| {
            for p in &self.cells[k] {
                if self.geometry.distance_sq(center, p) < r2 {
                    out.push(p);
                }
            }
        });
        Ok(out)
    }

    /// Removes every point strictly within `radius` of `center`.
    pub fn remove_within(&mut self, center: &Point<T>, radius: T) -> usize {
        let r2 = radius * radius;
        let mut touched: SmallVec<[usize; 32]> = SmallVec::new();
        self.visit_cells(center, radius, |k| touched.push(k));
        let mut removed = 0;
        for k in touched {
            let before = self.cells[k].len();
            let geometry = &self.geometry;
            self.cells[k].retain(|p| geometry.distance_sq(center, p) >= r2);
            removed += before - self.cells[k].len();
        }
        self.len -= removed;
        removed
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point<T>> {
        self.cells.iter().flatten()
    }
}
