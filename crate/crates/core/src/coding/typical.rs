//! Frequency-typical sets.

use alloc::vec::Vec;

use crate::channel::Budget;
use crate::error::{Error, Result};
use crate::info::Distribution;

/// Words of length `l` whose empirical distribution lies within ℓ1 distance
/// `radius` of `p` and which avoid the symbols of probability zero.
#[derive(Clone, Debug, PartialEq)]
pub struct TypicalSetSpec {
    pub p: Distribution,
    pub l: usize,
    pub radius: f64,
}

/// Slack on the ℓ1 comparison, so that exact-type boundaries are included.
const RADIUS_SLACK: f64 = 1e-12;

/// `l^{-1/8}`.
pub fn default_radius(l: usize) -> f64 {
    libm::pow(l as f64, -0.125)
}

impl TypicalSetSpec {
    pub fn new(p: Distribution, l: usize, radius: f64) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidParameter("blocklength must be positive".into()));
        }
        if radius.is_nan() || radius < 0.0 {
            return Err(Error::InvalidParameter(alloc::format!("typicality radius {radius} is negative")));
        }
        Ok(Self { p, l, radius })
    }

    /// Spec with the default radius `l^{-1/8}`.
    pub fn with_default_radius(p: Distribution, l: usize) -> Result<Self> {
        Self::new(p, l, default_radius(l))
    }

    /// `‖N(·|word)/l − p‖₁`.
    pub fn distance(&self, word: &[usize]) -> f64 {
        type_distance(word, self.p.as_slice())
    }

    pub fn contains(&self, word: &[usize]) -> bool {
        word.len() == self.l
            && word.iter().all(|&u| u < self.p.len() && self.p.get(u) > 0.0)
            && self.distance(word) <= self.radius + RADIUS_SLACK
    }
}

pub(crate) fn type_distance(word: &[usize], p: &[f64]) -> f64 {
    let mut counts = alloc::vec![0usize; p.len()];
    for &u in word {
        counts[u] += 1;
    }
    let l = word.len() as f64;
    counts.iter().zip(p).map(|(&n, &q)| libm::fabs(n as f64 / l - q)).sum()
}

/// All words over `[size]` of length `l` in lexicographic order.
pub(crate) fn all_words(size: usize, l: usize, budget: &Budget) -> Result<Vec<Vec<usize>>> {
    let symbols: Vec<usize> = (0..size).collect();
    words_over(&symbols, l, budget)
}

/// All words of length `l` over increasing `symbols`, in lexicographic order.
fn words_over(symbols: &[usize], l: usize, budget: &Budget) -> Result<Vec<Vec<usize>>> {
    let total = Budget::power("enumerated words", symbols.len(), l, budget.max_enumeration)?;
    let mut out = Vec::with_capacity(total);
    let mut digits = alloc::vec![0usize; l];
    for _ in 0..total {
        out.push(digits.iter().map(|&d| symbols[d]).collect());
        for pos in (0..l).rev() {
            digits[pos] += 1;
            if digits[pos] < symbols.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
    Ok(out)
}

/// The typical words in lexicographic order.
///
/// Fails with `BudgetExceeded` when the words over the support of `p` cannot
/// be enumerated; the predicate [`TypicalSetSpec::contains`] is still
/// available then.
pub fn typical_set(spec: &TypicalSetSpec, budget: &Budget) -> Result<Vec<Vec<usize>>> {
    let support: Vec<usize> = (0..spec.p.len()).filter(|&u| spec.p.get(u) > 0.0).collect();
    Ok(words_over(&support, spec.l, budget)?
        .into_iter()
        .filter(|w| spec.contains(w))
        .collect())
}
