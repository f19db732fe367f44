//! Finite-blocklength codes for the MAC with a common message.
//!
//! A code is assembled in two layers. Common codewords `u^l_m` are drawn from
//! a typical set and decoded by a square-root measurement `Ξ` over the
//! averaged channel. For each `m` the positions of `u^l_m` are sorted into
//! blocks of equal auxiliary symbol, each block gets random private
//! codebooks and a square-root measurement over typical projectors, and the
//! block measurements are tensored and permuted back into channel-use order.
//! The final decoder is `Δ_{m,k,t} = √Ξ_m Λ^{(m)}_{k,t} √Ξ_m`.

mod codebook;
mod pgm;
mod typical;

use alloc::vec::Vec;

use crate::channel::{averaged_cq_channel, Budget, CcqMac};
use crate::error::{Error, Result};
use crate::info::InputLaw;
use crate::linalg::{trace_pair, HermitianOperator, Povm};
use crate::par::map_range;

pub use codebook::{sample_common_codebook, sample_private_codebooks, sorting_permutation, CommonCodebook, PrivateCodebooks};
pub use pgm::{build_pgm_decoder, compose_two_stage, permute_operator, typical_projector};
pub use typical::{default_radius, typical_set, TypicalSetSpec};

/// Typicality width used for private decoders when none is given: support
/// projectors up to length 4, one bit from length 5 on.
pub fn default_delta(l: usize) -> f64 {
    if l <= 4 {
        f64::INFINITY
    } else {
        1.0
    }
}

/// How the unassigned outcome `D_0 = 1 − Σ D_i` is scored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ResidualPolicy {
    /// `D_0` is a decoding failure.
    #[default]
    Error,
    /// `D_0` is merged into the last outcome.
    Fold,
}

/// A code with common messages `m ∈ [M]` and private messages `k ∈ [K]`, `t ∈ [T]`.
///
/// Codewords are stored as `x_words[m * K + k]`, `y_words[m * T + t]`, and
/// POVM elements as `(m * K + k) * T + t`.
#[derive(Clone, Debug)]
pub struct CommonMessageCode {
    l: usize,
    shape: (usize, usize, usize),
    x_words: Vec<Vec<usize>>,
    y_words: Vec<Vec<usize>>,
    povm: Povm,
}

impl CommonMessageCode {
    pub fn new(
        l: usize,
        (m, k, t): (usize, usize, usize),
        x_words: Vec<Vec<usize>>,
        y_words: Vec<Vec<usize>>,
        povm: Povm,
    ) -> Result<Self> {
        if m == 0 || k == 0 || t == 0 || l == 0 {
            return Err(Error::InvalidParameter("message sets and blocklength must be positive".into()));
        }
        let found = (x_words.len() / k, k, y_words.len() / t);
        if x_words.len() != m * k || y_words.len() != m * t {
            return Err(Error::ShapeMismatch {
                expected: (m, k, t),
                found,
            });
        }
        if povm.len() != m * k * t {
            return Err(Error::ShapeMismatch {
                expected: (m, k, t),
                found: (povm.len() / (k * t).max(1), k, t),
            });
        }
        if let Some(bad) = x_words.iter().chain(&y_words).find(|w| w.len() != l) {
            return Err(Error::LengthMismatch {
                left: l,
                right: bad.len(),
            });
        }
        Ok(Self {
            l,
            shape: (m, k, t),
            x_words,
            y_words,
            povm,
        })
    }

    pub fn blocklength(&self) -> usize {
        self.l
    }

    /// `(M, K, T)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        self.shape
    }

    pub fn x_word(&self, k: usize, m: usize) -> &[usize] {
        &self.x_words[m * self.shape.1 + k]
    }

    pub fn y_word(&self, t: usize, m: usize) -> &[usize] {
        &self.y_words[m * self.shape.2 + t]
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn outcome_index(&self, m: usize, k: usize, t: usize) -> usize {
        (m * self.shape.1 + k) * self.shape.2 + t
    }

    /// The same codewords with another decoder.
    pub fn with_povm(&self, povm: Povm) -> Result<Self> {
        Self::new(self.l, self.shape, self.x_words.clone(), self.y_words.clone(), povm)
    }
}

/// Parameters of a randomly assembled code.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodeParams {
    pub l: usize,
    pub m: usize,
    pub k: usize,
    pub t: usize,
    /// Private typicality width; `None` means [`default_delta`].
    pub delta: Option<f64>,
    pub seed: u64,
}

/// An assembled code together with the random choices that produced it.
#[derive(Clone, Debug)]
pub struct AssembledCode {
    pub code: CommonMessageCode,
    pub u_words: Vec<Vec<usize>>,
    pub private: Vec<PrivateCodebooks>,
    pub delta: f64,
    pub common_fallback: bool,
}

/// Square-root measurement over one block's `(k_u, t_u)` typical projectors,
/// ordered `k_u * T_u + t_u`.
fn block_decoder(w: &CcqMac, xs: &[Vec<usize>], ys: &[Vec<usize>], delta: f64, budget: &Budget) -> Result<Povm> {
    let mut projectors = Vec::with_capacity(xs.len() * ys.len());
    for xw in xs {
        for yw in ys {
            projectors.push(typical_projector(w, xw, yw, delta, budget)?);
        }
    }
    build_pgm_decoder(&projectors)
}

/// `Λ^{(m)}_{k,t}` for all `k < K`, `t < T`, in channel-use order.
fn private_decoder(w: &CcqMac, books: &PrivateCodebooks, delta: f64, budget: &Budget) -> Result<Povm> {
    let blocks: Vec<usize> = (0..books.block_lengths.len()).filter(|&u| books.block_lengths[u] > 0).collect();
    let decoders = blocks
        .iter()
        .map(|&u| block_decoder(w, &books.x_blocks[u], &books.y_blocks[u], delta, budget))
        .collect::<Result<Vec<_>>>()?;
    let mut elements = Vec::with_capacity(books.k * books.t);
    for k in 0..books.k {
        let kd = books.x_digits(k);
        for t in 0..books.t {
            let td = books.y_digits(t);
            let mut op: Option<HermitianOperator> = None;
            for (decoder, &u) in decoders.iter().zip(&blocks) {
                let factor = decoder.element(kd[u] * books.y_blocks[u].len() + td[u]);
                op = Some(match op {
                    None => factor.clone(),
                    Some(acc) => acc.tensor(factor),
                });
            }
            let op = op.ok_or(Error::EmptyList)?;
            elements.push(permute_operator(&op, w.dim(), &books.permutation)?);
        }
    }
    Povm::new(elements)
}

/// Build a random code for `law` at blocklength `l` with `M·K·T` messages.
pub fn assemble_common_code(w: &CcqMac, law: &InputLaw, params: &CodeParams, budget: &Budget) -> Result<AssembledCode> {
    let CodeParams { l, m, k, t, seed, .. } = *params;
    let delta = params.delta.unwrap_or_else(|| default_delta(l));
    if k == 0 || t == 0 {
        return Err(Error::InvalidParameter("private message sets must be nonempty".into()));
    }
    let dim = budget.state_dim(w.dim(), l)?;
    budget.check_bank(m.saturating_mul(k).saturating_mul(t), dim)?;
    let v = averaged_cq_channel(w, law)?;
    let common = sample_common_codebook(&v, law.p(), l, m, seed, budget)?;
    let private = common
        .words
        .iter()
        .enumerate()
        .map(|(mi, u_word)| sample_private_codebooks(law, u_word, k, t, seed, mi))
        .collect::<Result<Vec<_>>>()?;
    let lambdas = private
        .iter()
        .map(|books| private_decoder(w, books, delta, budget))
        .collect::<Result<Vec<_>>>()?;
    let povm = compose_two_stage(&common.decoder, &lambdas)?;
    let x_words = private.iter().flat_map(|b| (0..k).map(move |ki| b.x_word(ki))).collect();
    let y_words = private.iter().flat_map(|b| (0..t).map(move |ti| b.y_word(ti))).collect();
    Ok(AssembledCode {
        code: CommonMessageCode::new(l, (m, k, t), x_words, y_words, povm)?,
        u_words: common.words,
        private,
        delta,
        common_fallback: common.fallback,
    })
}

/// Square-root measurement over all `M·K·T` codeword output states at once.
///
/// Offered as a single-stage comparison decoder; it is not the two-stage
/// construction.
pub fn joint_pgm_decoder(code: &CommonMessageCode, w: &CcqMac, budget: &Budget) -> Result<Povm> {
    let (m, k, t) = code.shape();
    budget.check_bank(m * k * t, budget.state_dim(w.dim(), code.l)?)?;
    let mut states = Vec::with_capacity(m * k * t);
    for mi in 0..m {
        for ki in 0..k {
            for ti in 0..t {
                states.push(w.tensor_power_output(code.x_word(ki, mi), code.y_word(ti, mi), budget)?.as_operator());
            }
        }
    }
    build_pgm_decoder(&states)
}

/// `(1/(K T M)) Σ tr(Δ_{k,t,m} W^{⊗l}(f(k,m), g(t,m)))`, evaluated exactly.
pub fn success_probability_common(code: &CommonMessageCode, w: &CcqMac, policy: ResidualPolicy, budget: &Budget) -> Result<f64> {
    let dim = budget.state_dim(w.dim(), code.l)?;
    if code.povm.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: code.povm.dim(),
        });
    }
    let folded;
    let povm = match policy {
        ResidualPolicy::Error => &code.povm,
        ResidualPolicy::Fold => {
            folded = code.povm.fold_residual();
            &folded
        }
    };
    let (m, k, t) = code.shape;
    let per_message = map_range(m, |mi| -> Result<f64> {
        let mut acc = 0.0;
        for ki in 0..k {
            for ti in 0..t {
                let rho = w.tensor_power_output(code.x_word(ki, mi), code.y_word(ti, mi), budget)?;
                acc += trace_pair(povm.element(code.outcome_index(mi, ki, ti)), &rho)?;
            }
        }
        Ok(acc)
    });
    let mut total = 0.0;
    for value in per_message {
        total += value?;
    }
    Ok(total / (m * k * t) as f64)
}
