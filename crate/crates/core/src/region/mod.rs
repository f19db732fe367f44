//! Rate bounds, region approximations and membership queries.
//!
//! A law `p(u) r(x|u) s(y|u)` fixes four Holevo quantities, and those fix a
//! staircase polytope of rates. Regions are unions of these polytopes over
//! laws; they are approximated from inside by optimal polytope vertices and
//! from outside by supporting half-spaces.

mod frontier;
mod membership;
mod optimize;

use crate::channel::CcqMac;
use crate::error::{Error, Result};
use crate::info::{holevo_terms, HolevoTerms, InputLaw};

pub use frontier::{
    compare_regions, default_directions, region_frontier, region_grid, CompareReport, FrontierSettings, RegionApprox,
    RegionMetadata,
};
pub use membership::{membership, Verdict};
pub use optimize::{support_maximize, support_maximize_from, OptimizerSettings, SupportResult};

/// Which region is being described.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RegionMode {
    /// Rate pairs `(R_M, R_N)` with conference budgets `C` and `D` bits per use.
    Conferencing { c: f64, d: f64 },
    /// Rate triples `(S_C, S_X, S_Y)` with a common message.
    Common,
}

impl RegionMode {
    pub fn dimension(&self) -> usize {
        match self {
            RegionMode::Conferencing { .. } => 2,
            RegionMode::Common => 3,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if let RegionMode::Conferencing { c, d } = *self {
            if c.is_nan() || d.is_nan() || c < 0.0 || d < 0.0 {
                return Err(Error::InvalidParameter(alloc::format!(
                    "conference budgets must be nonnegative, got C={c}, D={d}"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn bounds(&self, terms: &HolevoTerms) -> BoundSet {
        match *self {
            RegionMode::Conferencing { c, d } => BoundSet {
                single_x: terms.x_given_yu + c,
                single_y: terms.y_given_xu + d,
                sum_cond: terms.xy_given_u + c + d,
                sum: terms.xy,
            },
            RegionMode::Common => BoundSet {
                single_x: terms.x_given_yu,
                single_y: terms.y_given_xu,
                sum_cond: terms.xy_given_u,
                sum: terms.xy,
            },
        }
    }
}

/// A rate pair or triple in bits per channel use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    coords: [f64; 3],
    len: usize,
}

impl RatePoint {
    pub fn pair(r_m: f64, r_n: f64) -> Self {
        Self {
            coords: [r_m, r_n, 0.0],
            len: 2,
        }
    }

    pub fn triple(s_c: f64, s_x: f64, s_y: f64) -> Self {
        Self {
            coords: [s_c, s_x, s_y],
            len: 3,
        }
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        match *coords {
            [a, b] => Ok(Self::pair(a, b)),
            [a, b, c] => Ok(Self::triple(a, b, c)),
            _ => Err(Error::DimensionMismatch {
                expected: 2,
                found: coords.len(),
            }),
        }
    }

    pub fn dimension(&self) -> usize {
        self.len
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..self.len]
    }

    pub fn dot(&self, direction: &[f64]) -> f64 {
        self.as_slice().iter().zip(direction).map(|(a, b)| a * b).sum()
    }
}

/// Right-hand sides of the four rate inequalities of one law.
///
/// Conferencing: `R_M ≤ single_x`, `R_N ≤ single_y`, `R_M + R_N ≤ sum_cond`,
/// `R_M + R_N ≤ sum`. Common message: `S_X ≤ single_x`, `S_Y ≤ single_y`,
/// `S_X + S_Y ≤ sum_cond`, `S_C + S_X + S_Y ≤ sum`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundSet {
    pub single_x: f64,
    pub single_y: f64,
    pub sum_cond: f64,
    pub sum: f64,
}

impl BoundSet {
    /// Maximum of `⟨direction, rate⟩` over the polytope and a maximizing vertex.
    pub fn support(&self, mode: RegionMode, direction: &[f64]) -> Result<(f64, RatePoint)> {
        check_direction(direction, mode.dimension())?;
        Ok(match mode {
            RegionMode::Conferencing { .. } => {
                let (value, (a, b)) = staircase_support(self.single_x, self.single_y, self.sum_cond.min(self.sum), direction[0], direction[1]);
                (value, RatePoint::pair(a, b))
            }
            RegionMode::Common => {
                let total = self.sum.max(0.0);
                let pair_cap = self.sum_cond.min(total);
                let [wc, wx, wy] = [direction[0], direction[1], direction[2]];
                let mut best = (f64::NEG_INFINITY, RatePoint::triple(0.0, 0.0, 0.0));
                for (x, y) in staircase_vertices(self.single_x, self.single_y, pair_cap) {
                    for s_c in [0.0, (total - x - y).max(0.0)] {
                        let value = wc * s_c + wx * x + wy * y;
                        if value > best.0 {
                            best = (value, RatePoint::triple(s_c, x, y));
                        }
                    }
                }
                best
            }
        })
    }

    /// Whether `point` satisfies every inequality (and nonnegativity) within `tol`.
    pub fn contains(&self, mode: RegionMode, point: &RatePoint, tol: f64) -> bool {
        let v = point.as_slice();
        if v.iter().any(|&x| x < -tol) || v.len() != mode.dimension() {
            return false;
        }
        match mode {
            RegionMode::Conferencing { .. } => {
                v[0] <= self.single_x + tol
                    && v[1] <= self.single_y + tol
                    && v[0] + v[1] <= self.sum_cond.min(self.sum) + tol
            }
            RegionMode::Common => {
                v[1] <= self.single_x + tol
                    && v[2] <= self.single_y + tol
                    && v[1] + v[2] <= self.sum_cond + tol
                    && v[0] + v[1] + v[2] <= self.sum + tol
            }
        }
    }
}

pub(crate) fn check_direction(direction: &[f64], dimension: usize) -> Result<()> {
    if direction.len() != dimension {
        return Err(Error::DimensionMismatch {
            expected: dimension,
            found: direction.len(),
        });
    }
    if direction.iter().any(|&x| x.is_nan() || x < 0.0 || !x.is_finite()) || direction.iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "direction must be nonnegative, finite and nonzero: {direction:?}"
        )));
    }
    Ok(())
}

/// Vertices of `{a, b ≥ 0, a ≤ a_max, b ≤ b_max, a + b ≤ s}`.
fn staircase_vertices(a_max: f64, b_max: f64, s: f64) -> [(f64, f64); 5] {
    let s = s.max(0.0);
    let a = a_max.max(0.0).min(s);
    let b = b_max.max(0.0).min(s);
    [(0.0, 0.0), (a, 0.0), (0.0, b), (a, (s - a).min(b)), ((s - b).min(a), b)]
}

fn staircase_support(a_max: f64, b_max: f64, s: f64, wa: f64, wb: f64) -> (f64, (f64, f64)) {
    let mut best = (f64::NEG_INFINITY, (0.0, 0.0));
    for (a, b) in staircase_vertices(a_max, b_max, s) {
        let value = wa * a + wb * b;
        if value > best.0 {
            best = (value, (a, b));
        }
    }
    best
}

/// The four conferencing bounds of `law`: `χ(X;Q|Y,U)+C`, `χ(Y;Q|X,U)+D`,
/// `χ(X,Y;Q|U)+C+D` and `χ(X,Y;Q)`.
pub fn conferencing_bounds(w: &CcqMac, law: &InputLaw, c: f64, d: f64) -> Result<BoundSet> {
    let mode = RegionMode::Conferencing { c, d };
    mode.validate()?;
    Ok(mode.bounds(&holevo_terms(w, law)?))
}

/// The four common-message bounds of `law`.
pub fn common_message_bounds(w: &CcqMac, law: &InputLaw) -> Result<BoundSet> {
    Ok(RegionMode::Common.bounds(&holevo_terms(w, law)?))
}
