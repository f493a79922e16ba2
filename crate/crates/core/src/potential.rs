//! Finite-range repulsive pair potentials.
//!
//! All built-in kinds are radial: `phi(x)` depends only on `|x|`. Values are
//! nonnegative and may be `+inf` (hard core); `phi(x) = 0` for `|x| >= range`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, Point};
use crate::quadrature::adaptive_simpson;
use crate::scalar::{exp_neg, Real};

/// Relative tolerance for the radial quadrature of `C_phi`.
pub const TEMPEREDNESS_RTOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PairPotential<T> {
    /// `+inf` for `|x| < range`.
    HardSphere { range: T },
    /// `strength` for `|x| < range`.
    Strauss { range: T, strength: T },
    /// Right-continuous step function: entry `(r_i, v_i)` gives `phi = v_i`
    /// on `r_{i-1} <= |x| < r_i`, with `r_0 = 0`; the last radius is the range.
    Tabulated { steps: Vec<(T, T)> },
}

/// Temperedness constant `C_phi = int |1 - e^{-phi}|` and how it was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialConstants {
    pub c_phi: f64,
    pub quadrature_nodes: usize,
    pub error_estimate: f64,
}

impl<T: Real> PairPotential<T> {
    pub fn hard_sphere(range: T) -> Result<Self> {
        check_range(range)?;
        Ok(PairPotential::HardSphere { range })
    }

    pub fn strauss(range: T, strength: T) -> Result<Self> {
        check_range(range)?;
        if !(strength >= T::zero()) {
            return Err(Error::InvalidPotential(
                "strauss strength must be nonnegative".into(),
            ));
        }
        Ok(PairPotential::Strauss { range, strength })
    }

    /// `phi == 0`, represented as a zero-strength Strauss potential of unit range.
    pub fn ideal() -> Self {
        PairPotential::Strauss {
            range: T::one(),
            strength: T::zero(),
        }
    }

    pub fn tabulated(steps: Vec<(T, T)>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidPotential("table is empty".into()));
        }
        let mut prev = T::zero();
        for &(r, v) in &steps {
            if !(r > prev) || !r.is_finite() {
                return Err(Error::InvalidPotential(
                    "table radii must be finite and strictly increasing from 0".into(),
                ));
            }
            if !(v >= T::zero()) {
                return Err(Error::InvalidPotential(
                    "table values must be nonnegative".into(),
                ));
            }
            prev = r;
        }
        Ok(PairPotential::Tabulated { steps })
    }

    /// Parses a table with one `radius value` pair per line; `inf` is accepted
    /// as a value, blank lines and `#` comments are ignored.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut steps = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::InvalidPotential(format!("line {}: expected `radius value`", lineno + 1));
            let mut it = line.split_whitespace();
            let r: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let v_str = it.next().ok_or_else(bad)?;
            if it.next().is_some() {
                return Err(bad());
            }
            let v: f64 = match v_str {
                "inf" | "+inf" | "Inf" | "infinity" => f64::INFINITY,
                s => s.parse().map_err(|_| bad())?,
            };
            steps.push((T::of(r), T::of(v)));
        }
        Self::tabulated(steps)
    }

    pub fn range(&self) -> T {
        match self {
            PairPotential::HardSphere { range } | PairPotential::Strauss { range, .. } => *range,
            PairPotential::Tabulated { steps } => steps.last().map(|s| s.0).unwrap_or(T::zero()),
        }
    }

    /// True when `phi` vanishes identically.
    pub fn is_trivial(&self) -> bool {
        match self {
            PairPotential::HardSphere { .. } => false,
            PairPotential::Strauss { strength, .. } => *strength == T::zero(),
            PairPotential::Tabulated { steps } => steps.iter().all(|s| s.1 == T::zero()),
        }
    }

    /// `phi` as a function of the distance `|x|`.
    #[inline]
    pub fn value_at(&self, dist: T) -> T {
        match self {
            PairPotential::HardSphere { range } => {
                if dist < *range {
                    T::infinity()
                } else {
                    T::zero()
                }
            }
            PairPotential::Strauss { range, strength } => {
                if dist < *range {
                    *strength
                } else {
                    T::zero()
                }
            }
            PairPotential::Tabulated { steps } => steps
                .iter()
                .find(|s| dist < s.0)
                .map(|s| s.1)
                .unwrap_or(T::zero()),
        }
    }

    pub fn evaluate(&self, displacement: &Point<T>) -> T {
        self.value_at(displacement.norm())
    }

    /// `e^{-phi}`, exactly `0` on a hard core.
    #[inline]
    pub fn boltzmann_at(&self, dist: T) -> T {
        exp_neg(self.value_at(dist))
    }

    pub fn boltzmann(&self, displacement: &Point<T>) -> T {
        self.boltzmann_at(displacement.norm())
    }

    /// The radial steps `(outer radius, value)` of the potential.
    pub fn radial_steps(&self) -> Vec<(T, T)> {
        match self {
            PairPotential::HardSphere { range } => vec![(*range, T::infinity())],
            PairPotential::Strauss { range, strength } => vec![(*range, *strength)],
            PairPotential::Tabulated { steps } => steps.clone(),
        }
    }

    /// Temperedness constant in dimension `dim`.
    ///
    /// Closed form for hard spheres (`|B_r|`) and Strauss
    /// (`(1 - e^{-A}) |B_r|`); radial adaptive Simpson for tables.
    pub fn temperedness(&self, dim: usize) -> PotentialConstants {
        let vb = unit_ball_volume(dim);
        match self {
            PairPotential::HardSphere { range } => PotentialConstants {
                c_phi: vb * range.f64().powi(dim as i32),
                quadrature_nodes: 0,
                error_estimate: 0.0,
            },
            PairPotential::Strauss { range, strength } => PotentialConstants {
                c_phi: (1.0 - (-strength.f64()).exp()) * vb * range.f64().powi(dim as i32),
                quadrature_nodes: 0,
                error_estimate: 0.0,
            },
            PairPotential::Tabulated { steps } => {
                // radial integrand s_d rho^{d-1} (1 - e^{-phi(rho)}) on each smooth piece
                let surface = dim as f64 * vb;
                let mut total = 0.0;
                let mut err = 0.0;
                let mut nodes = 0;
                let mut lo = 0.0;
                for &(r, v) in steps {
                    let hi = r.f64();
                    let weight = 1.0 - exp_neg(v.f64());
                    let f = |rho: f64| surface * rho.powi(dim as i32 - 1) * weight;
                    let (val, e, n) = adaptive_simpson(&f, lo, hi, TEMPEREDNESS_RTOL);
                    total += val;
                    err += e;
                    nodes += n;
                    lo = hi;
                }
                PotentialConstants {
                    c_phi: total,
                    quadrature_nodes: nodes,
                    error_estimate: err,
                }
            }
        }
    }
}

fn check_range<T: Real>(range: T) -> Result<()> {
    if !(range > T::zero()) || !range.is_finite() {
        return Err(Error::InvalidPotential(
            "range must be positive and finite".into(),
        ));
    }
    Ok(())
}
