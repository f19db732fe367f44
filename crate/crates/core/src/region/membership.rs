//! Point-in-region queries against a [`RegionApprox`].

use alloc::vec::Vec;

use crate::error::{Error, Result};

use super::{RatePoint, RegionApprox};

/// Slack granted to a query point in both directions.
const QUERY_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Dominated by a convex combination of achieved points.
    Inside,
    /// Violates a supporting half-space or has a negative coordinate.
    Outside,
    /// Between the inner and outer approximations.
    Uncertain,
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Verdict::Inside => "Inside",
            Verdict::Outside => "Outside",
            Verdict::Uncertain => "Uncertain",
        })
    }
}

pub fn membership(point: &RatePoint, region: &RegionApprox) -> Result<Verdict> {
    if point.dimension() != region.dimension() {
        return Err(Error::DimensionMismatch {
            expected: region.dimension(),
            found: point.dimension(),
        });
    }
    let v = point.as_slice();
    if v.iter().any(|&x| x.is_nan() || x < -QUERY_TOL) {
        return Ok(Verdict::Outside);
    }
    let target: Vec<f64> = v.iter().map(|&x| (x - QUERY_TOL).max(0.0)).collect();
    let vertices: Vec<&[f64]> = region.inner_points.iter().map(RatePoint::as_slice).collect();
    if dominated_by_hull(&target, &vertices) {
        return Ok(Verdict::Inside);
    }
    if region.outer_halfspaces().any(|(d, h)| point.dot(d) > h + QUERY_TOL) {
        return Ok(Verdict::Outside);
    }
    Ok(Verdict::Uncertain)
}

/// Whether `target ≤ Σ λ_i v_i` for some `λ ≥ 0` with `Σ λ_i ≤ 1`.
///
/// Decided through the dual program `max ⟨target, y⟩` subject to
/// `⟨v_i, y⟩ ≤ 1`, `y ≥ 0`: the target is dominated iff the optimum is at most 1.
fn dominated_by_hull(target: &[f64], vertices: &[&[f64]]) -> bool {
    match maximize(target, vertices) {
        Some(value) => value <= 1.0 + PIVOT_TOL,
        None => false,
    }
}

/// `max ⟨c, y⟩` subject to `A y ≤ 1`, `y ≥ 0`, by the tableau simplex method
/// with Bland's rule. `None` when unbounded.
fn maximize(c: &[f64], rows: &[&[f64]]) -> Option<f64> {
    let (m, n) = (rows.len(), c.len());
    let width = n + m + 1;
    let rhs = width - 1;
    let mut t = alloc::vec![alloc::vec![0.0; width]; m + 1];
    for (i, row) in rows.iter().enumerate() {
        t[i][..n].copy_from_slice(row);
        t[i][n + i] = 1.0;
        t[i][rhs] = 1.0;
    }
    for j in 0..n {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    loop {
        let Some(enter) = (0..rhs).find(|&j| t[m][j] < -PIVOT_TOL) else {
            return Some(t[m][rhs]);
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][enter] > PIVOT_TOL {
                let ratio = t[i][rhs] / t[i][enter];
                let replace = match leave {
                    None => true,
                    Some((k, best)) => ratio < best - PIVOT_TOL || (ratio <= best + PIVOT_TOL && basis[i] < basis[k]),
                };
                if replace {
                    leave = Some((i, ratio));
                }
            }
        }
        let (row, _) = leave?;
        let pivot = t[row][enter];
        t[row].iter_mut().for_each(|x| *x /= pivot);
        let pivot_row = t[row].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != row {
                let factor = r[enter];
                if factor != 0.0 {
                    r.iter_mut().zip(&pivot_row).for_each(|(x, p)| *x -= factor * p);
                }
            }
        }
        basis[row] = enter;
    }
}
