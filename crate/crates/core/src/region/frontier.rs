//! Inner and outer approximations of a region from a fixed direction grid.

use alloc::string::String;
use alloc::vec::Vec;

use crate::channel::CcqMac;
use crate::error::{Error, Result};
use crate::info::{HolevoTerms, InputLaw};
use crate::par::map_range;

use super::optimize::{better, support_maximize, OptimizerSettings, SupportResult};
use super::{check_direction, RatePoint, RegionMode};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FrontierSettings {
    /// Number of directions; `None` picks 64 in the plane and 200 in space.
    pub n_directions: Option<usize>,
    pub optimizer: OptimizerSettings,
}

impl FrontierSettings {
    pub fn resolved_directions(&self, dimension: usize) -> usize {
        self.n_directions.unwrap_or(if dimension == 2 { 64 } else { 200 })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionMetadata {
    pub channel_hash: String,
    pub seed: u64,
    pub starts: usize,
    pub u_size: usize,
    pub n_directions: usize,
    pub initial_step: f64,
    pub min_step: f64,
}

/// A region described by supporting half-spaces `⟨d, rate⟩ ≤ h(d)` and the
/// achieving vertices, one per direction.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionApprox {
    pub mode: RegionMode,
    pub directions: Vec<Vec<f64>>,
    pub support_values: Vec<f64>,
    pub inner_points: Vec<RatePoint>,
    /// Law achieving each direction's support value.
    pub laws: Vec<InputLaw>,
    pub terms: Vec<HolevoTerms>,
    pub metadata: RegionMetadata,
}

impl RegionApprox {
    pub fn dimension(&self) -> usize {
        self.mode.dimension()
    }

    pub fn outer_halfspaces(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.directions.iter().map(Vec::as_slice).zip(self.support_values.iter().copied())
    }

    /// Largest value of `⟨direction, rate⟩` over the stored laws' polytopes.
    pub fn support(&self, direction: &[f64]) -> Result<f64> {
        check_direction(direction, self.dimension())?;
        let mut best = 0.0_f64;
        for t in &self.terms {
            best = best.max(self.mode.bounds(t).support(self.mode, direction)?.0);
        }
        Ok(best)
    }
}

/// The direction grid: evenly spaced angles on the quarter circle, or a
/// Fibonacci sphere folded into the nonnegative octant.
pub fn default_directions(dimension: usize, n: usize) -> Result<Vec<Vec<f64>>> {
    if n < 3 {
        return Err(Error::InvalidParameter(alloc::format!("need at least 3 directions, got {n}")));
    }
    match dimension {
        2 => Ok((0..n)
            .map(|i| {
                if i == 0 {
                    alloc::vec![1.0, 0.0]
                } else if i == n - 1 {
                    alloc::vec![0.0, 1.0]
                } else {
                    let angle = core::f64::consts::FRAC_PI_2 * i as f64 / (n - 1) as f64;
                    alloc::vec![libm::cos(angle), libm::sin(angle)]
                }
            })
            .collect()),
        3 => {
            let golden = core::f64::consts::PI * (3.0 - libm::sqrt(5.0));
            Ok((0..n)
                .map(|i| {
                    let z = 1.0 - (2 * i + 1) as f64 / n as f64;
                    let radius = libm::sqrt(1.0 - z * z);
                    let phi = golden * i as f64;
                    alloc::vec![libm::fabs(z), libm::fabs(radius * libm::cos(phi)), libm::fabs(radius * libm::sin(phi))]
                })
                .collect())
        }
        other => Err(Error::DimensionMismatch {
            expected: 2,
            found: other,
        }),
    }
}

/// Region approximation for one mode.
pub fn region_frontier(w: &CcqMac, mode: RegionMode, settings: &FrontierSettings) -> Result<RegionApprox> {
    Ok(region_grid(w, &[mode], settings)?.remove(0))
}

/// Region approximations for several modes of equal dimension.
///
/// Every mode is optimized on the same direction grid with the same seed, and
/// the optimal laws of all modes and directions form one pool from which each
/// support value is taken. Support values are therefore monotone in the
/// conference budgets, and every inner point lies inside every half-space of
/// its own region.
pub fn region_grid(w: &CcqMac, modes: &[RegionMode], settings: &FrontierSettings) -> Result<Vec<RegionApprox>> {
    let first = modes.first().ok_or(Error::EmptyList)?;
    let dimension = first.dimension();
    for mode in modes {
        mode.validate()?;
        if mode.dimension() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: mode.dimension(),
            });
        }
    }
    let n = settings.resolved_directions(dimension);
    let directions = default_directions(dimension, n)?;
    let jobs = modes.len() * n;
    let results: Vec<Result<SupportResult>> = map_range(jobs, |job| {
        support_maximize(w, &directions[job % n], modes[job / n], &settings.optimizer)
    });
    let pool: Vec<SupportResult> = results.into_iter().collect::<Result<_>>()?;

    let metadata = RegionMetadata {
        channel_hash: w.fingerprint(),
        seed: settings.optimizer.seed,
        starts: settings.optimizer.starts,
        u_size: settings.optimizer.resolved_u_size(w),
        n_directions: n,
        initial_step: settings.optimizer.initial_step,
        min_step: settings.optimizer.min_step,
    };
    let mut regions = Vec::with_capacity(modes.len());
    for &mode in modes {
        let mut region = RegionApprox {
            mode,
            directions: directions.clone(),
            support_values: Vec::with_capacity(n),
            inner_points: Vec::with_capacity(n),
            laws: Vec::with_capacity(n),
            terms: Vec::with_capacity(n),
            metadata: metadata.clone(),
        };
        for direction in &directions {
            let mut best: Option<SupportResult> = None;
            for candidate in &pool {
                let (value, point) = mode.bounds(&candidate.terms).support(mode, direction)?;
                let result = SupportResult {
                    value,
                    point,
                    law: candidate.law.clone(),
                    terms: candidate.terms,
                };
                if best.as_ref().is_none_or(|b| better(&result, b)) {
                    best = Some(result);
                }
            }
            let best = best.expect("pool has one entry per direction");
            region.support_values.push(best.value);
            region.inner_points.push(clip(best.point));
            region.laws.push(best.law);
            region.terms.push(best.terms);
        }
        regions.push(region);
    }
    Ok(regions)
}

fn clip(point: RatePoint) -> RatePoint {
    let mut v = [0.0; 3];
    for (dst, &src) in v.iter_mut().zip(point.as_slice()) {
        *dst = src.max(0.0);
    }
    RatePoint::from_slice(&v[..point.dimension()]).expect("dimension 2 or 3")
}

/// Per-direction support values of two conferencing budgets and their differences.
#[derive(Clone, Debug, PartialEq)]
pub struct CompareReport {
    pub directions: Vec<Vec<f64>>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    /// `second − first`, per direction.
    pub deltas: Vec<f64>,
}

impl CompareReport {
    pub fn max_delta(&self) -> f64 {
        self.deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Support values for budgets `(C1, D1)` and `(C2, D2)` from a shared law pool.
pub fn compare_regions(w: &CcqMac, first: (f64, f64), second: (f64, f64), settings: &FrontierSettings) -> Result<CompareReport> {
    let modes = [
        RegionMode::Conferencing { c: first.0, d: first.1 },
        RegionMode::Conferencing {
            c: second.0,
            d: second.1,
        },
    ];
    let regions = region_grid(w, &modes, settings)?;
    let deltas = regions[1].support_values.iter().zip(&regions[0].support_values).map(|(b, a)| b - a).collect();
    Ok(CompareReport {
        directions: regions[0].directions.clone(),
        first: regions[0].support_values.clone(),
        second: regions[1].support_values.clone(),
        deltas,
    })
}
