//! Random common and private codebooks.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::channel::{Budget, CqChannel};
use crate::error::{Error, Result};
use crate::info::{Distribution, InputLaw};
use crate::linalg::Povm;
use crate::rng::{categorical, substream, TAG_COMMON_CODEBOOK, TAG_PRIVATE_X, TAG_PRIVATE_Y};

use super::pgm::build_pgm_decoder;
use super::typical::{all_words, type_distance, typical_set, TypicalSetSpec};

/// Common codewords and their square-root measurement.
#[derive(Clone, Debug)]
pub struct CommonCodebook {
    pub words: Vec<Vec<usize>>,
    pub decoder: Povm,
    /// Set when the typical set held fewer than `M` words and the nearest
    /// types were used instead.
    pub fallback: bool,
}

/// Draw `m` distinct typical words for `v` and build the square-root
/// measurement over `V^{⊗l}(u^l)`.
///
/// When fewer than `m` words are typical, the `m` words whose types are
/// closest to `p` in ℓ1 (ties lexicographic) are used.
pub fn sample_common_codebook(
    v: &CqChannel,
    p: &Distribution,
    l: usize,
    m: usize,
    seed: u64,
    budget: &Budget,
) -> Result<CommonCodebook> {
    if p.len() != v.u_size() {
        return Err(Error::AlphabetMismatch {
            what: "common codebook distribution",
            expected: v.u_size(),
            found: p.len(),
        });
    }
    if m == 0 {
        return Err(Error::InvalidParameter("common message set is empty".into()));
    }
    let dim = budget.state_dim(v.dim(), l)?;
    budget.check_bank(m, dim)?;
    let spec = TypicalSetSpec::with_default_radius(p.clone(), l)?;
    let mut pool = typical_set(&spec, budget)?;
    let fallback = pool.len() < m;
    let words = if fallback {
        let mut all = all_words(p.len(), l, budget)?;
        if all.len() < m {
            return Err(Error::InvalidParameter(alloc::format!(
                "{m} distinct common codewords requested but only {} words of length {l} exist",
                all.len()
            )));
        }
        let q = p.as_slice();
        all.sort_by(|a, b| type_distance(a, q).total_cmp(&type_distance(b, q)).then_with(|| a.cmp(b)));
        all.truncate(m);
        all
    } else {
        pool.shuffle(&mut substream(seed, &[TAG_COMMON_CODEBOOK]));
        pool.truncate(m);
        pool
    };
    let states = words
        .iter()
        .map(|w| v.tensor_power_output(w, budget).map(|s| s.as_operator()))
        .collect::<Result<Vec<_>>>()?;
    Ok(CommonCodebook {
        words,
        decoder: build_pgm_decoder(&states)?,
        fallback,
    })
}

/// Stable argsort: position `j` of the sorted word holds `word[σ[j]]`.
pub fn sorting_permutation(word: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..word.len()).collect();
    order.sort_by_key(|&i| word[i]);
    order
}

/// Per-block message counts whose product is at least `total`.
///
/// A block of length `l_b` gets `⌈total^{l_b/l}⌉`; empty blocks get one.
/// Counts are then lowered, shortest block first, while the product still
/// covers `total`, so that few measurement outcomes go unused.
pub(crate) fn block_counts(total: usize, lengths: &[usize]) -> Vec<usize> {
    let l: usize = lengths.iter().sum();
    let mut counts: Vec<usize> = lengths
        .iter()
        .map(|&lb| {
            if lb == 0 {
                1
            } else {
                let share = libm::pow(total as f64, lb as f64 / l as f64);
                (libm::ceil(share - 1e-9) as usize).max(1)
            }
        })
        .collect();
    let longest = (0..lengths.len()).max_by_key(|&b| (lengths[b], core::cmp::Reverse(b))).unwrap_or(0);
    while counts.iter().product::<usize>() < total {
        counts[longest] += 1;
    }
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by_key(|&b| (lengths[b], core::cmp::Reverse(b)));
    for b in order {
        while counts[b] > 1 {
            let rest: usize = counts.iter().enumerate().filter(|&(i, _)| i != b).map(|(_, &c)| c).product();
            if rest * (counts[b] - 1) < total {
                break;
            }
            counts[b] -= 1;
        }
    }
    counts
}

/// Mixed-radix digits of `index`, first block most significant.
pub(crate) fn digits(mut index: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = alloc::vec![0; radices.len()];
    for (slot, &radix) in out.iter_mut().zip(radices).rev() {
        *slot = index % radix;
        index /= radix;
    }
    out
}

/// Private codebooks attached to one common codeword.
///
/// Positions are grouped by auxiliary symbol after sorting the common word;
/// block `u` carries its own codebook of words drawn i.i.d. from `r(·|u)`
/// (resp. `s(·|u)`), and a private message is a tuple of block indices.
#[derive(Clone, Debug, PartialEq)]
pub struct PrivateCodebooks {
    pub permutation: Vec<usize>,
    pub block_lengths: Vec<usize>,
    /// `x_blocks[u][k_u]` is a word of length `block_lengths[u]`.
    pub x_blocks: Vec<Vec<Vec<usize>>>,
    pub y_blocks: Vec<Vec<Vec<usize>>>,
    pub k: usize,
    pub t: usize,
}

impl PrivateCodebooks {
    pub fn x_counts(&self) -> Vec<usize> {
        self.x_blocks.iter().map(Vec::len).collect()
    }

    pub fn y_counts(&self) -> Vec<usize> {
        self.y_blocks.iter().map(Vec::len).collect()
    }

    pub fn x_digits(&self, k: usize) -> Vec<usize> {
        digits(k, &self.x_counts())
    }

    pub fn y_digits(&self, t: usize) -> Vec<usize> {
        digits(t, &self.y_counts())
    }

    fn unsort(&self, blocks: &[Vec<Vec<usize>>], choice: &[usize]) -> Vec<usize> {
        let sorted: Vec<usize> = blocks.iter().zip(choice).flat_map(|(b, &i)| b[i].iter().copied()).collect();
        let mut word = alloc::vec![0; sorted.len()];
        for (j, &symbol) in sorted.iter().enumerate() {
            word[self.permutation[j]] = symbol;
        }
        word
    }

    /// The x-codeword of private message `k`, in channel-use order.
    pub fn x_word(&self, k: usize) -> Vec<usize> {
        self.unsort(&self.x_blocks, &self.x_digits(k))
    }

    pub fn y_word(&self, t: usize) -> Vec<usize> {
        self.unsort(&self.y_blocks, &self.y_digits(t))
    }
}

fn draw_block(seed: u64, tag: u64, m: usize, u: usize, count: usize, len: usize, law: &Distribution) -> Vec<Vec<usize>> {
    let mut rng = substream(seed, &[tag, m as u64, u as u64]);
    (0..count)
        .map(|_| (0..len).map(|_| categorical(&mut rng, law.as_slice())).collect())
        .collect()
}

/// Private codebooks for common message `m` with codeword `u_word`.
pub fn sample_private_codebooks(
    law: &InputLaw,
    u_word: &[usize],
    k: usize,
    t: usize,
    seed: u64,
    m: usize,
) -> Result<PrivateCodebooks> {
    if k == 0 || t == 0 {
        return Err(Error::InvalidParameter("private message sets must be nonempty".into()));
    }
    if let Some(&bad) = u_word.iter().find(|&&u| u >= law.u_size()) {
        return Err(Error::AlphabetMismatch {
            what: "common codeword symbol",
            expected: law.u_size(),
            found: bad,
        });
    }
    let mut block_lengths = alloc::vec![0usize; law.u_size()];
    for &u in u_word {
        block_lengths[u] += 1;
    }
    let kx = block_counts(k, &block_lengths);
    let ky = block_counts(t, &block_lengths);
    let x_blocks = (0..law.u_size())
        .map(|u| draw_block(seed, TAG_PRIVATE_X, m, u, kx[u], block_lengths[u], law.r(u)))
        .collect();
    let y_blocks = (0..law.u_size())
        .map(|u| draw_block(seed, TAG_PRIVATE_Y, m, u, ky[u], block_lengths[u], law.s(u)))
        .collect();
    Ok(PrivateCodebooks {
        permutation: sorting_permutation(u_word),
        block_lengths,
        x_blocks,
        y_blocks,
        k,
        t,
    })
}
