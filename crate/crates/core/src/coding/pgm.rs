//! Square-root measurements, typical projectors and their composition.

use alloc::vec::Vec;

use crate::channel::{Budget, CcqMac};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator, Povm, C64, EPS_SUPP};

/// Square-root measurement `S^{-1/2} P_i S^{-1/2}` with `S = Σ_j P_j`.
pub fn build_pgm_decoder(ops: &[HermitianOperator]) -> Result<Povm> {
    let dim = ops.first().ok_or(Error::EmptyList)?.dim();
    let mut total = HermitianOperator::zeros(dim);
    for op in ops {
        if op.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: op.dim(),
            });
        }
        total = total.add(op);
    }
    let inv = total.inv_sqrt_on_support()?;
    Povm::new(ops.iter().map(|op| op.sandwich(&inv)).collect())
}

/// Spectral projector of `W^{⊗l}(x^l, y^l)` onto the eigenvalues `λ` with
/// `|−(1/l) log2 λ − S̄| ≤ delta`, `S̄` the mean output entropy along the
/// words. An infinite `delta` gives the support projector.
pub fn typical_projector(
    w: &CcqMac,
    x_word: &[usize],
    y_word: &[usize],
    delta: f64,
    budget: &Budget,
) -> Result<HermitianOperator> {
    if x_word.len() != y_word.len() {
        return Err(Error::LengthMismatch {
            left: x_word.len(),
            right: y_word.len(),
        });
    }
    if x_word.is_empty() {
        return Err(Error::EmptyList);
    }
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::InvalidParameter(alloc::format!("typicality width {delta} is negative")));
    }
    let (l, d) = (x_word.len(), w.dim());
    let total = budget.state_dim(d, l)?;
    for (&x, &y) in x_word.iter().zip(y_word) {
        if x >= w.x_size() || y >= w.y_size() {
            return Err(Error::InvalidParameter(alloc::format!("input pair ({x},{y}) outside the alphabet")));
        }
    }
    let factors: Vec<_> = x_word
        .iter()
        .zip(y_word)
        .map(|(&x, &y)| w.output(x, y).as_operator().eigensystem())
        .collect();
    let mean_entropy = x_word
        .iter()
        .zip(y_word)
        .map(|(&x, &y)| w.output(x, y).entropy())
        .sum::<f64>()
        / l as f64;

    let mut columns: Vec<C64> = Vec::new();
    let mut rank = 0;
    let mut digits = alloc::vec![0usize; l];
    for _ in 0..total {
        let supported = digits.iter().zip(&factors).all(|(&a, f)| f.values[a] >= EPS_SUPP);
        if supported {
            let log_lambda: f64 = digits.iter().zip(&factors).map(|(&a, f)| libm::log2(f.values[a])).sum();
            if delta.is_infinite() || libm::fabs(-log_lambda / l as f64 - mean_entropy) <= delta {
                let mut v = ComplexMatrix::from_element(1, 1, C64::new(1.0, 0.0));
                for (&a, f) in digits.iter().zip(&factors) {
                    v = v.kronecker(&f.vectors.column(a).into_owned());
                }
                columns.extend(v.iter());
                rank += 1;
            }
        }
        for pos in (0..l).rev() {
            digits[pos] += 1;
            if digits[pos] < d {
                break;
            }
            digits[pos] = 0;
        }
    }
    let basis = ComplexMatrix::from_column_slice(total, rank, &columns);
    Ok(HermitianOperator::from_raw(&basis * basis.adjoint()))
}

/// Index map sending the tensor factor at position `j` to position `perm[j]`.
fn position_map(dim: usize, perm: &[usize]) -> Result<Vec<usize>> {
    let l = perm.len();
    let mut seen = alloc::vec![false; l];
    for &p in perm {
        if p >= l || core::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidParameter(alloc::format!("{perm:?} is not a permutation")));
        }
    }
    let total = dim.pow(l as u32);
    let mut stride = alloc::vec![1usize; l];
    for pos in (0..l.saturating_sub(1)).rev() {
        stride[pos] = stride[pos + 1] * dim;
    }
    Ok((0..total)
        .map(|index| {
            (0..l)
                .map(|j| ((index / stride[j]) % dim) * stride[perm[j]])
                .sum()
        })
        .collect())
}

/// `P_π A P_π†`, where `P_π` moves tensor factor `j` of `(C^dim)^{⊗l}` to position `perm[j]`.
pub fn permute_operator(op: &HermitianOperator, dim: usize, perm: &[usize]) -> Result<HermitianOperator> {
    let map = position_map(dim, perm)?;
    if op.dim() != map.len() {
        return Err(Error::DimensionMismatch {
            expected: map.len(),
            found: op.dim(),
        });
    }
    let src = op.matrix();
    let mut out = ComplexMatrix::zeros(map.len(), map.len());
    for (i, &ti) in map.iter().enumerate() {
        for (j, &tj) in map.iter().enumerate() {
            out[(ti, tj)] = src[(i, j)];
        }
    }
    Ok(HermitianOperator::from_raw(out))
}

/// `Δ_{m,i} = √Ξ_m Λ^{(m)}_i √Ξ_m`, ordered by `m` and then `i`.
pub fn compose_two_stage(xi: &Povm, lambdas: &[Povm]) -> Result<Povm> {
    if lambdas.len() != xi.len() {
        return Err(Error::DimensionMismatch {
            expected: xi.len(),
            found: lambdas.len(),
        });
    }
    let mut elements = Vec::new();
    for (outer, inner) in xi.elements().iter().zip(lambdas) {
        if inner.dim() != xi.dim() {
            return Err(Error::DimensionMismatch {
                expected: xi.dim(),
                found: inner.dim(),
            });
        }
        let root = outer.sqrt_on_support()?;
        elements.extend(inner.elements().iter().map(|e| e.sandwich(&root)));
    }
    Povm::new(elements)
}
