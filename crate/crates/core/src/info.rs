//! Holevo information and its conditional variants for the auxiliary-variable
//! ensembles `p(u) r(x|u) s(y|u) |u,x,y⟩⟨u,x,y| ⊗ W(x,y)`.
//!
//! Conditional quantities are weighted sums of unconditional Holevo
//! quantities of conditioned sub-ensembles, so the working dimension stays at
//! the channel output dimension.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::Complex;

use crate::channel::{CcqMac, CqChannel};
use crate::error::{Error, Result};
use crate::linalg::{entropy_of_state_matrix, shannon_entropy, ComplexMatrix, DensityMatrix};

/// Tolerance on the normalization of probability vectors.
pub const DIST_TOL: f64 = 1e-12;

/// A probability vector over `0..len`.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::check(&weights, "distribution")?;
        Ok(Self(weights))
    }

    fn check(weights: &[f64], what: &'static str) -> Result<()> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution {
                what,
                reason: "empty support".into(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDistribution {
                what,
                reason: format!("weight {w} is not a nonnegative number"),
            });
        }
        let total: f64 = weights.iter().sum();
        if libm::fabs(total - 1.0) > DIST_TOL {
            return Err(Error::InvalidDistribution {
                what,
                reason: format!("weights sum to {total}"),
            });
        }
        Ok(())
    }

    /// Divides by the total; fails on an all-zero or invalid vector.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 || !total.is_finite() {
            return Err(Error::InvalidDistribution {
                what: "distribution",
                reason: "weights have no positive mass".into(),
            });
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(weights)
    }

    pub fn uniform(len: usize) -> Self {
        Self(alloc::vec![1.0 / len as f64; len])
    }

    pub fn point(len: usize, index: usize) -> Self {
        let mut w = alloc::vec![0.0; len];
        w[index] = 1.0;
        Self(w)
    }

    pub(crate) fn from_raw(weights: Vec<f64>) -> Self {
        Self(weights)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.0)
    }
}

/// Factored input law `p(u) r(x|u) s(y|u)`.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct InputLaw {
    p: Distribution,
    r: Vec<Distribution>,
    s: Vec<Distribution>,
}

impl InputLaw {
    pub fn new(p: Distribution, r: Vec<Distribution>, s: Vec<Distribution>) -> Result<Self> {
        let u_size = p.len();
        for (what, rows) in [("r(.|u) rows", &r), ("s(.|u) rows", &s)] {
            if rows.len() != u_size {
                return Err(Error::AlphabetMismatch {
                    what,
                    expected: u_size,
                    found: rows.len(),
                });
            }
            let width = rows[0].len();
            if let Some(bad) = rows.iter().find(|row| row.len() != width) {
                return Err(Error::AlphabetMismatch {
                    what,
                    expected: width,
                    found: bad.len(),
                });
            }
        }
        Ok(Self { p, r, s })
    }

    /// Law with a single auxiliary symbol and the given marginals.
    pub fn product(r: Distribution, s: Distribution) -> Self {
        Self {
            p: Distribution::point(1, 0),
            r: alloc::vec![r],
            s: alloc::vec![s],
        }
    }

    pub fn uniform(u_size: usize, x_size: usize, y_size: usize) -> Self {
        Self {
            p: Distribution::uniform(u_size),
            r: alloc::vec![Distribution::uniform(x_size); u_size],
            s: alloc::vec![Distribution::uniform(y_size); u_size],
        }
    }

    pub fn u_size(&self) -> usize {
        self.p.len()
    }

    pub fn x_size(&self) -> usize {
        self.r[0].len()
    }

    pub fn y_size(&self) -> usize {
        self.s[0].len()
    }

    pub fn p(&self) -> &Distribution {
        &self.p
    }

    pub fn r(&self, u: usize) -> &Distribution {
        &self.r[u]
    }

    pub fn s(&self, u: usize) -> &Distribution {
        &self.s[u]
    }

    pub fn joint(&self, u: usize, x: usize, y: usize) -> f64 {
        self.p.get(u) * self.r[u].get(x) * self.s[u].get(y)
    }

    /// Marginal of `(x, y)`, flattened as `x * y_size + y`.
    pub fn xy_marginal(&self) -> Distribution {
        let (xs, ys) = (self.x_size(), self.y_size());
        let mut w = alloc::vec![0.0; xs * ys];
        for u in 0..self.u_size() {
            for x in 0..xs {
                for y in 0..ys {
                    w[x * ys + y] += self.joint(u, x, y);
                }
            }
        }
        Distribution::from_raw(w)
    }

    /// All parameters in the order `p, r(.|0), …, s(.|0), …`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.p.as_slice().to_vec();
        for row in self.r.iter().chain(&self.s) {
            out.extend_from_slice(row.as_slice());
        }
        out
    }

    pub(crate) fn from_raw_parts(p: Vec<f64>, r: Vec<Vec<f64>>, s: Vec<Vec<f64>>) -> Self {
        Self {
            p: Distribution::from_raw(p),
            r: r.into_iter().map(Distribution::from_raw).collect(),
            s: s.into_iter().map(Distribution::from_raw).collect(),
        }
    }

    pub fn check_matches(&self, w: &CcqMac) -> Result<()> {
        if self.x_size() != w.x_size() {
            return Err(Error::AlphabetMismatch {
                what: "X alphabet",
                expected: w.x_size(),
                found: self.x_size(),
            });
        }
        if self.y_size() != w.y_size() {
            return Err(Error::AlphabetMismatch {
                what: "Y alphabet",
                expected: w.y_size(),
                found: self.y_size(),
            });
        }
        Ok(())
    }
}

/// Which conditional Holevo quantity of the `(U, X, Y, Q)` ensemble to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conditioning {
    /// `χ(X;Q|Y,U)`
    XGivenYU,
    /// `χ(Y;Q|X,U)`
    YGivenXU,
    /// `χ(X,Y;Q|U)`
    XYGivenU,
    /// `χ(X,Y;Q)`
    XY,
}

/// Weighted mixture of raw state matrices, skipping zero weights.
pub(crate) fn mix_matrices<'a>(
    dim: usize,
    terms: impl IntoIterator<Item = (f64, &'a ComplexMatrix)>,
) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for (w, m) in terms {
        if w != 0.0 {
            acc.zip_apply(m, |a, b| *a += b * Complex::new(w, 0.0));
        }
    }
    acc
}

/// `χ = S(Σ p ρ) − Σ p S(ρ)` over raw states with precomputed entropies.
fn holevo_raw(dim: usize, weights: &[f64], states: &[&ComplexMatrix], entropies: &[f64]) -> f64 {
    let avg = mix_matrices(dim, weights.iter().copied().zip(states.iter().copied()));
    let mean_entropy: f64 = weights.iter().zip(entropies).map(|(w, s)| w * s).sum();
    entropy_of_state_matrix(&avg) - mean_entropy
}

/// Holevo information `χ(p, V)` in bits.
pub fn holevo(p: &Distribution, v: &CqChannel) -> Result<f64> {
    if p.len() != v.u_size() {
        return Err(Error::AlphabetMismatch {
            what: "cq-channel input",
            expected: v.u_size(),
            found: p.len(),
        });
    }
    let states: Vec<&ComplexMatrix> = v.outputs().iter().map(DensityMatrix::matrix).collect();
    let entropies: Vec<f64> = v.outputs().iter().map(DensityMatrix::entropy).collect();
    Ok(holevo_raw(v.dim(), p.as_slice(), &states, &entropies))
}

/// The four Holevo quantities of one law, as used in every rate bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolevoTerms {
    pub x_given_yu: f64,
    pub y_given_xu: f64,
    pub xy_given_u: f64,
    pub xy: f64,
}

impl HolevoTerms {
    pub fn get(&self, which: Conditioning) -> f64 {
        match which {
            Conditioning::XGivenYU => self.x_given_yu,
            Conditioning::YGivenXU => self.y_given_xu,
            Conditioning::XYGivenU => self.xy_given_u,
            Conditioning::XY => self.xy,
        }
    }
}

/// Output entropies `S(W(x,y))`, flattened as `x * y_size + y`.
pub(crate) fn output_entropies(w: &CcqMac) -> Vec<f64> {
    w.outputs().iter().map(DensityMatrix::entropy).collect()
}

pub fn holevo_terms(w: &CcqMac, law: &InputLaw) -> Result<HolevoTerms> {
    law.check_matches(w)?;
    let entropies = output_entropies(w);
    let (xs, ys, dim) = (w.x_size(), w.y_size(), w.dim());
    let mut terms = HolevoTerms {
        x_given_yu: 0.0,
        y_given_xu: 0.0,
        xy_given_u: 0.0,
        xy: 0.0,
    };
    for u in 0..law.u_size() {
        let pu = law.p().get(u);
        if pu == 0.0 {
            continue;
        }
        let r = law.r(u).as_slice();
        let s = law.s(u).as_slice();
        for y in 0..ys {
            let weight = pu * s[y];
            if weight == 0.0 {
                continue;
            }
            let states: Vec<&ComplexMatrix> = (0..xs).map(|x| w.output(x, y).matrix()).collect();
            let ents: Vec<f64> = (0..xs).map(|x| entropies[x * ys + y]).collect();
            terms.x_given_yu += weight * holevo_raw(dim, r, &states, &ents);
        }
        for x in 0..xs {
            let weight = pu * r[x];
            if weight == 0.0 {
                continue;
            }
            let states: Vec<&ComplexMatrix> = (0..ys).map(|y| w.output(x, y).matrix()).collect();
            let ents: Vec<f64> = (0..ys).map(|y| entropies[x * ys + y]).collect();
            terms.y_given_xu += weight * holevo_raw(dim, s, &states, &ents);
        }
        let rs: Vec<f64> = (0..xs * ys).map(|i| r[i / ys] * s[i % ys]).collect();
        let states: Vec<&ComplexMatrix> = w.outputs().iter().map(DensityMatrix::matrix).collect();
        terms.xy_given_u += pu * holevo_raw(dim, &rs, &states, &entropies);
    }
    let joint = law.xy_marginal();
    let states: Vec<&ComplexMatrix> = w.outputs().iter().map(DensityMatrix::matrix).collect();
    terms.xy = holevo_raw(dim, joint.as_slice(), &states, &entropies);
    Ok(terms)
}

/// One conditional Holevo quantity of the law's ensemble, in bits.
pub fn conditional_holevo(w: &CcqMac, law: &InputLaw, which: Conditioning) -> Result<f64> {
    holevo_terms(w, law).map(|t| t.get(which))
}

/// `χ(X1;Q1) + χ(X2;Q2) − χ(X1,X2;Q1,Q2)` for the ensemble
/// `Σ p(x1,x2) |x1 x2⟩⟨x1 x2| ⊗ W1(x1) ⊗ W2(x2)`.
///
/// `joint` is flattened as `x1 * |X2| + x2`. The result is nonnegative up to
/// rounding (subadditivity of the Holevo quantity).
pub fn subadditivity_gap(w1: &CqChannel, w2: &CqChannel, joint: &Distribution) -> Result<f64> {
    let (n1, n2) = (w1.u_size(), w2.u_size());
    if joint.len() != n1 * n2 {
        return Err(Error::AlphabetMismatch {
            what: "joint input distribution",
            expected: n1 * n2,
            found: joint.len(),
        });
    }
    let j = joint.as_slice();
    let p1 = Distribution::from_raw((0..n1).map(|a| (0..n2).map(|b| j[a * n2 + b]).sum()).collect());
    let p2 = Distribution::from_raw((0..n2).map(|b| (0..n1).map(|a| j[a * n2 + b]).sum()).collect());
    let pairs: Vec<DensityMatrix> = (0..n1 * n2)
        .map(|i| w1.output(i / n2).tensor(w2.output(i % n2)))
        .collect();
    let product = CqChannel::from_states(pairs)?;
    Ok(holevo(&p1, w1)? + holevo(&p2, w2)? - holevo(joint, &product)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn plus() -> DensityMatrix {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap()
    }

    #[test]
    fn holevo_examples() {
        let same = CqChannel::from_states(alloc::vec![DensityMatrix::maximally_mixed(2); 3]).unwrap();
        let v = holevo(&Distribution::uniform(3), &same).unwrap();
        assert!(libm::fabs(v) < 1e-12);

        let bits =
            CqChannel::from_states(alloc::vec![DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)]).unwrap();
        assert!(libm::fabs(holevo(&Distribution::uniform(2), &bits).unwrap() - 1.0) < 1e-12);

        // Average of |0⟩ and |+⟩ has eigenvalues (1 ± 1/√2)/2.
        let ch = CqChannel::from_states(alloc::vec![DensityMatrix::basis(2, 0), plus()]).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let expected = shannon_entropy(&[(1.0 + h) / 2.0, (1.0 - h) / 2.0]);
        let got = holevo(&Distribution::uniform(2), &ch).unwrap();
        assert!(libm::fabs(got - expected) < 1e-12);
        assert!(libm::fabs(got - 0.600_876_036_7) < 1e-9);

        assert!(matches!(
            holevo(&Distribution::uniform(3), &ch),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(alloc::vec![0.5, 0.5]).is_ok());
        assert!(Distribution::new(alloc::vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(alloc::vec![1.5, -0.5]).is_err());
        assert!(Distribution::new(alloc::vec![]).is_err());
        let d = Distribution::normalized(alloc::vec![1.0, 3.0]).unwrap();
        assert_eq!(d.as_slice(), &[0.25, 0.75]);
    }

    #[test]
    fn law_shape_checks() {
        let bad = InputLaw::new(
            Distribution::uniform(2),
            alloc::vec![Distribution::uniform(2)],
            alloc::vec![Distribution::uniform(2); 2],
        );
        assert!(matches!(bad, Err(Error::AlphabetMismatch { .. })));
    }

    #[test]
    fn x_independent_channel_has_no_x_information() {
        let states = alloc::vec![
            DensityMatrix::basis(2, 0),
            plus(),
            DensityMatrix::basis(2, 0),
            plus(),
        ];
        let w = CcqMac::from_states(2, 2, states).unwrap();
        let law = InputLaw::uniform(3, 2, 2);
        let v = conditional_holevo(&w, &law, Conditioning::XGivenYU).unwrap();
        assert!(libm::fabs(v) < 1e-12);
    }

    #[test]
    fn subadditivity_examples() {
        let bits =
            CqChannel::from_states(alloc::vec![DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)]).unwrap();
        let product = Distribution::new(alloc::vec![0.25; 4]).unwrap();
        assert!(libm::fabs(subadditivity_gap(&bits, &bits, &product).unwrap()) < 1e-12);
        let correlated = Distribution::new(alloc::vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(libm::fabs(subadditivity_gap(&bits, &bits, &correlated).unwrap() - 1.0) < 1e-12);
    }
}
