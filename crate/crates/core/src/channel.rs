//! Classical-classical-quantum multiple access channels and cq-channels.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use sha2::{Digest, Sha256};

use crate::error::{ChannelInput, Error, Result};
use crate::info::InputLaw;
use crate::linalg::{tensor_product, ComplexMatrix, DensityMatrix};

/// Renormalization band applied to channel outputs on validation.
pub const TRACE_RENORM_BAND: f64 = 1e-6;

/// Resource limits for exact simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest Hilbert-space dimension `dim^l` of a constructed state or operator.
    pub max_state_dim: usize,
    /// Largest total number of complex entries across a bank of measurement operators.
    pub max_bank_entries: usize,
    /// Largest number of words enumerated when listing typical sets.
    pub max_enumeration: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_state_dim: 4096,
            max_bank_entries: 1 << 25,
            max_enumeration: 1 << 20,
        }
    }
}

impl Budget {
    /// `base^exp`, failing if it exceeds `limit`.
    pub(crate) fn power(what: &'static str, base: usize, exp: usize, limit: usize) -> Result<usize> {
        let value = u32::try_from(exp)
            .ok()
            .and_then(|e| base.checked_pow(e))
            .unwrap_or(usize::MAX);
        if value > limit {
            return Err(Error::BudgetExceeded {
                what,
                required: value,
                limit,
            });
        }
        Ok(value)
    }

    pub fn state_dim(&self, dim: usize, l: usize) -> Result<usize> {
        Self::power("tensor-power state dimension", dim, l, self.max_state_dim)
    }

    pub(crate) fn check_bank(&self, elements: usize, dim: usize) -> Result<()> {
        let required = elements.saturating_mul(dim).saturating_mul(dim);
        if required > self.max_bank_entries {
            return Err(Error::BudgetExceeded {
                what: "measurement bank entries",
                required,
                limit: self.max_bank_entries,
            });
        }
        Ok(())
    }
}

fn validate_output(raw: ComplexMatrix, dim: usize, input: ChannelInput) -> Result<DensityMatrix> {
    if raw.nrows() != dim || raw.ncols() != dim {
        return Err(Error::InvalidChannelOutput {
            input,
            reason: format!("expected {dim}x{dim}, found {}x{}", raw.nrows(), raw.ncols()),
        });
    }
    DensityMatrix::with_trace_band(raw, TRACE_RENORM_BAND).map_err(|e| Error::InvalidChannelOutput {
        input,
        reason: format!("{e}"),
    })
}

/// A ccq-MAC `W: X × Y → S(C^dim)`, outputs stored row-major as `x * y_size + y`.
#[derive(Clone, Debug, PartialEq)]
pub struct CcqMac {
    x_size: usize,
    y_size: usize,
    dim: usize,
    outputs: Vec<DensityMatrix>,
}

impl CcqMac {
    /// Validates raw output matrices, renormalizing traces within
    /// [`TRACE_RENORM_BAND`] of one.
    pub fn new(x_size: usize, y_size: usize, raw: Vec<ComplexMatrix>) -> Result<Self> {
        if x_size == 0 || y_size == 0 {
            return Err(Error::InvalidParameter("input alphabets must be nonempty".into()));
        }
        if raw.len() != x_size * y_size {
            return Err(Error::AlphabetMismatch {
                what: "channel outputs",
                expected: x_size * y_size,
                found: raw.len(),
            });
        }
        let dim = raw[0].nrows();
        let outputs = raw
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                let input = ChannelInput::Pair {
                    x: i / y_size,
                    y: i % y_size,
                };
                validate_output(m, dim, input)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            x_size,
            y_size,
            dim,
            outputs,
        })
    }

    pub fn from_states(x_size: usize, y_size: usize, states: Vec<DensityMatrix>) -> Result<Self> {
        Self::new(x_size, y_size, states.into_iter().map(DensityMatrix::into_matrix).collect())
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn output(&self, x: usize, y: usize) -> &DensityMatrix {
        &self.outputs[x * self.y_size + y]
    }

    pub fn outputs(&self) -> &[DensityMatrix] {
        &self.outputs
    }

    /// `V(u) = Σ_{x,y} r(x|u) s(y|u) W(x,y)`.
    pub fn averaged(&self, law: &InputLaw) -> Result<CqChannel> {
        averaged_cq_channel(self, law)
    }

    /// `⊗_i W(x_i, y_i)`.
    pub fn tensor_power_output(&self, x_word: &[usize], y_word: &[usize], budget: &Budget) -> Result<DensityMatrix> {
        tensor_power_output(self, x_word, y_word, budget)
    }

    /// Hex SHA-256 over the alphabet sizes and the IEEE bits of every entry.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for n in [self.x_size, self.y_size, self.dim] {
            hasher.update((n as u64).to_le_bytes());
        }
        for rho in &self.outputs {
            for z in rho.matrix().iter() {
                hasher.update(z.re.to_bits().to_le_bytes());
                hasher.update(z.im.to_bits().to_le_bytes());
            }
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// A cq-channel `V: U → S(C^dim)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CqChannel {
    dim: usize,
    outputs: Vec<DensityMatrix>,
}

impl CqChannel {
    pub fn new(raw: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = raw.first().ok_or(Error::EmptyList)?.nrows();
        let outputs = raw
            .into_iter()
            .enumerate()
            .map(|(u, m)| validate_output(m, dim, ChannelInput::Symbol(u)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dim, outputs })
    }

    pub fn from_states(states: Vec<DensityMatrix>) -> Result<Self> {
        Self::new(states.into_iter().map(DensityMatrix::into_matrix).collect())
    }

    pub fn u_size(&self) -> usize {
        self.outputs.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn output(&self, u: usize) -> &DensityMatrix {
        &self.outputs[u]
    }

    pub fn outputs(&self) -> &[DensityMatrix] {
        &self.outputs
    }

    /// `⊗_i V(u_i)`.
    pub fn tensor_power_output(&self, word: &[usize], budget: &Budget) -> Result<DensityMatrix> {
        budget.state_dim(self.dim, word.len())?;
        if let Some(&bad) = word.iter().find(|&&u| u >= self.u_size()) {
            return Err(Error::AlphabetMismatch {
                what: "cq-channel input symbol",
                expected: self.u_size(),
                found: bad,
            });
        }
        let factors: Vec<ComplexMatrix> = word.iter().map(|&u| self.outputs[u].matrix().clone()).collect();
        Ok(DensityMatrix::from_raw(tensor_product(&factors)?))
    }
}

/// The averaged channel `V(u) = Σ_{x,y} r(x|u) s(y|u) W(x,y)`.
pub fn averaged_cq_channel(w: &CcqMac, law: &InputLaw) -> Result<CqChannel> {
    law.check_matches(w)?;
    let (xs, ys) = (w.x_size, w.y_size);
    let outputs = (0..law.u_size())
        .map(|u| {
            let weights: Vec<f64> = (0..xs * ys)
                .map(|i| law.r(u).get(i / ys) * law.s(u).get(i % ys))
                .collect();
            let states: Vec<&DensityMatrix> = w.outputs.iter().collect();
            DensityMatrix::mixture(&weights, &states)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CqChannel { dim: w.dim, outputs })
}

/// `⊗_{i=1..l} W(x_i, y_i)`, subject to `dim^l ≤ budget.max_state_dim`.
pub fn tensor_power_output(w: &CcqMac, x_word: &[usize], y_word: &[usize], budget: &Budget) -> Result<DensityMatrix> {
    if x_word.len() != y_word.len() {
        return Err(Error::LengthMismatch {
            left: x_word.len(),
            right: y_word.len(),
        });
    }
    if x_word.is_empty() {
        return Err(Error::EmptyList);
    }
    budget.state_dim(w.dim, x_word.len())?;
    for (&x, &y) in x_word.iter().zip(y_word) {
        if x >= w.x_size || y >= w.y_size {
            return Err(Error::InvalidParameter(format!(
                "input pair ({x},{y}) outside {}x{} alphabet",
                w.x_size, w.y_size
            )));
        }
    }
    let factors: Vec<ComplexMatrix> = x_word
        .iter()
        .zip(y_word)
        .map(|(&x, &y)| w.output(x, y).matrix().clone())
        .collect();
    Ok(DensityMatrix::from_raw(tensor_product(&factors)?))
}
