//! Conferencing encoders.
//!
//! Before transmission the senders exchange `K` rounds of messages: at step
//! `i` sender 1 emits `v_i = f_i(m, w_1..w_{i-1})` and sender 2 emits
//! `w_i = g_i(n, v_1..v_{i-1})`. Sender 1 then encodes its transcript
//! `(m, w_1..w_K)` and sender 2 encodes `(n, v_1..v_K)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::channel::{Budget, CcqMac};
use crate::coding::{assemble_common_code, AssembledCode, CodeParams, CommonMessageCode, ResidualPolicy};
use crate::error::{Error, Result};
use crate::info::InputLaw;
use crate::linalg::{trace_pair, Povm};
use crate::par::map_range;

/// `[size]` split into `cells` consecutive ranges whose sizes differ by at
/// most one; the first `size % cells` cells are the larger ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellPartition {
    size: usize,
    cells: usize,
}

impl CellPartition {
    pub fn new(size: usize, cells: usize) -> Result<Self> {
        if cells == 0 || cells > size {
            return Err(Error::InvalidParameter(alloc::format!("cannot split {size} messages into {cells} cells")));
        }
        Ok(Self { size, cells })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn cell_size(&self, cell: usize) -> usize {
        self.size / self.cells + usize::from(cell < self.size % self.cells)
    }

    pub fn max_cell_size(&self) -> usize {
        self.cell_size(0)
    }

    pub fn cell_start(&self, cell: usize) -> usize {
        let base = self.size / self.cells;
        cell * base + cell.min(self.size % self.cells)
    }

    pub fn cell_of(&self, message: usize) -> usize {
        let big = self.size / self.cells + 1;
        let n_big = self.size % self.cells;
        if message < n_big * big {
            message / big
        } else {
            n_big + (message - n_big * big) / (self.size / self.cells)
        }
    }

    pub fn offset_in_cell(&self, message: usize) -> usize {
        message - self.cell_start(self.cell_of(message))
    }

    /// Whether all cells have the same size.
    pub fn is_exact(&self) -> bool {
        self.size.is_multiple_of(self.cells)
    }
}

/// Transcript function of one conference step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepRule {
    /// Announce the cell of the own message, ignoring the history.
    Partition(CellPartition),
    /// Explicit table keyed by (own message, opposite outputs so far).
    Table(BTreeMap<(usize, Vec<usize>), usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConferenceStep {
    /// Rule of sender 1 and the size of its output alphabet `|V_i|`.
    pub f: StepRule,
    pub v_size: usize,
    pub g: StepRule,
    pub w_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConferenceProtocol {
    pub m_size: usize,
    pub n_size: usize,
    pub steps: Vec<ConferenceStep>,
}

impl ConferenceProtocol {
    /// The protocol with no exchange.
    pub fn silent(m_size: usize, n_size: usize) -> Self {
        Self {
            m_size,
            n_size,
            steps: Vec::new(),
        }
    }

    /// Partitions of a one-step partition protocol.
    pub fn one_step_partitions(&self) -> Option<(CellPartition, CellPartition)> {
        match self.steps.as_slice() {
            [ConferenceStep {
                f: StepRule::Partition(a),
                g: StepRule::Partition(b),
                ..
            }] => Some((*a, *b)),
            _ => None,
        }
    }
}

fn apply(rule: &StepRule, step: usize, sender: u8, message: usize, history: &[usize]) -> Result<usize> {
    match rule {
        StepRule::Partition(p) => Ok(p.cell_of(message)),
        StepRule::Table(table) => table.get(&(message, history.to_vec())).copied().ok_or_else(|| Error::TableIncomplete {
            step,
            sender,
            message,
            history: history.to_vec(),
        }),
    }
}

/// Transcripts `(m, w_1..w_K)` of sender 1 and `(n, v_1..v_K)` of sender 2.
pub fn run_conference(m: usize, n: usize, protocol: &ConferenceProtocol) -> Result<(Vec<usize>, Vec<usize>)> {
    if m >= protocol.m_size || n >= protocol.n_size {
        return Err(Error::InvalidParameter(alloc::format!(
            "message pair ({m},{n}) outside {}x{}",
            protocol.m_size,
            protocol.n_size
        )));
    }
    let mut from_1 = Vec::with_capacity(protocol.steps.len());
    let mut from_2 = Vec::with_capacity(protocol.steps.len());
    for (i, step) in protocol.steps.iter().enumerate() {
        let v = apply(&step.f, i + 1, 1, m, &from_2)?;
        let w = apply(&step.g, i + 1, 2, n, &from_1)?;
        from_1.push(v);
        from_2.push(w);
    }
    let mut c = alloc::vec![m];
    c.extend(from_2);
    let mut d = alloc::vec![n];
    d.extend(from_1);
    Ok((c, d))
}

fn cell_count(messages: usize, budget: f64, l: usize) -> usize {
    let rate = libm::log2(messages as f64) / l as f64;
    let share = rate.min(budget);
    let cells = libm::ceil(libm::exp2(l as f64 * share) - 1e-9);
    (cells as usize).clamp(1, messages)
}

/// One-step conference: each sender announces the cell of its message among
/// `⌈2^{l·min(R, C)}⌉` near-equal cells, `R = log2(M)/l`.
pub fn willems_one_step(m_size: usize, n_size: usize, c: f64, d: f64, l: usize) -> Result<ConferenceProtocol> {
    if m_size == 0 || n_size == 0 || l == 0 {
        return Err(Error::InvalidParameter("message sets and blocklength must be positive".into()));
    }
    if c.is_nan() || d.is_nan() || c < 0.0 || d < 0.0 {
        return Err(Error::InvalidParameter(alloc::format!("conference budgets must be nonnegative, got C={c}, D={d}")));
    }
    let pm = CellPartition::new(m_size, cell_count(m_size, c, l))?;
    let pn = CellPartition::new(n_size, cell_count(n_size, d, l))?;
    Ok(ConferenceProtocol {
        m_size,
        n_size,
        steps: alloc::vec![ConferenceStep {
            f: StepRule::Partition(pm),
            v_size: pm.cells(),
            g: StepRule::Partition(pn),
            w_size: pn.cells(),
        }],
    })
}

/// Conference bits against both readings of the budget: `C` in total, and
/// `l·C` in total over a block of length `l`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateReport {
    /// `Σ_i log2|V_i|`.
    pub bits_1: f64,
    /// `Σ_i log2|W_i|`.
    pub bits_2: f64,
    pub literal_pass: bool,
    pub scaled_pass: bool,
    /// Bits above `l·C` and `l·D`, zero when within budget.
    pub excess_1: f64,
    pub excess_2: f64,
}

impl RateReport {
    /// Pass/fail under the per-block reading `l·C`, `l·D`.
    pub fn passes(&self) -> bool {
        self.scaled_pass
    }
}

const RATE_SLACK: f64 = 1e-9;

pub fn verify_rate_constraints(protocol: &ConferenceProtocol, c: f64, d: f64, l: usize) -> RateReport {
    let bits_1: f64 = protocol.steps.iter().map(|s| libm::log2(s.v_size as f64)).sum();
    let bits_2: f64 = protocol.steps.iter().map(|s| libm::log2(s.w_size as f64)).sum();
    let (lc, ld) = (l as f64 * c, l as f64 * d);
    RateReport {
        bits_1,
        bits_2,
        literal_pass: bits_1 <= c + RATE_SLACK && bits_2 <= d + RATE_SLACK,
        scaled_pass: bits_1 <= lc + RATE_SLACK && bits_2 <= ld + RATE_SLACK,
        excess_1: (bits_1 - lc).max(0.0),
        excess_2: (bits_2 - ld).max(0.0),
    }
}

/// A code for `M × N` messages with conferencing encoders.
#[derive(Clone, Debug)]
pub struct ConferencingCode {
    pub l: usize,
    pub protocol: ConferenceProtocol,
    /// Sender 1's codeword for each transcript.
    pub f: BTreeMap<Vec<usize>, Vec<usize>>,
    pub g: BTreeMap<Vec<usize>, Vec<usize>>,
    /// Decoder over `(m, n)`, element `m * N + n`.
    pub povm: Povm,
}

impl ConferencingCode {
    pub fn new(
        l: usize,
        protocol: ConferenceProtocol,
        f: BTreeMap<Vec<usize>, Vec<usize>>,
        g: BTreeMap<Vec<usize>, Vec<usize>>,
        povm: Povm,
    ) -> Result<Self> {
        let (ms, ns) = (protocol.m_size, protocol.n_size);
        if povm.len() != ms * ns {
            return Err(Error::ShapeMismatch {
                expected: (ms * ns, 1, 1),
                found: (povm.len(), 1, 1),
            });
        }
        let code = Self { l, protocol, f, g, povm };
        for m in 0..ms {
            for n in 0..ns {
                code.codewords(m, n)?;
            }
        }
        Ok(code)
    }

    pub fn messages(&self) -> (usize, usize) {
        (self.protocol.m_size, self.protocol.n_size)
    }

    /// `(f_l(C(m,n)), g_l(D(m,n)))`.
    pub fn codewords(&self, m: usize, n: usize) -> Result<(&[usize], &[usize])> {
        let (c, d) = run_conference(m, n, &self.protocol)?;
        let missing = |which: &str, t: &[usize]| Error::InvalidParameter(alloc::format!("encoder {which} has no codeword for transcript {t:?}"));
        let x = self.f.get(&c).ok_or_else(|| missing("1", &c))?;
        let y = self.g.get(&d).ok_or_else(|| missing("2", &d))?;
        if x.len() != self.l || y.len() != self.l {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        Ok((x, y))
    }

    /// Message rates `(log2 M / l, log2 N / l)`.
    pub fn rates(&self) -> (f64, f64) {
        let (m, n) = self.messages();
        (libm::log2(m as f64) / self.l as f64, libm::log2(n as f64) / self.l as f64)
    }
}

/// Turn a common-message code into a conferencing code for a one-step
/// partition protocol: the pair of announced cells is the common message and
/// the positions inside the cells are the private messages.
pub fn conferencing_code_from_common(common: &CommonMessageCode, protocol: &ConferenceProtocol) -> Result<ConferencingCode> {
    let (pm, pn) = protocol
        .one_step_partitions()
        .ok_or_else(|| Error::InvalidParameter("reduction needs a one-step partition protocol".into()))?;
    let expected = (pm.cells() * pn.cells(), pm.max_cell_size(), pn.max_cell_size());
    if common.shape() != expected {
        return Err(Error::ShapeMismatch {
            expected,
            found: common.shape(),
        });
    }
    let mut f = BTreeMap::new();
    let mut g = BTreeMap::new();
    let mut elements = Vec::with_capacity(pm.size() * pn.size());
    for m in 0..pm.size() {
        for n in 0..pn.size() {
            let (i, k) = (pm.cell_of(m), pm.offset_in_cell(m));
            let (j, t) = (pn.cell_of(n), pn.offset_in_cell(n));
            let common_index = i * pn.cells() + j;
            f.insert(alloc::vec![m, j], common.x_word(k, common_index).to_vec());
            g.insert(alloc::vec![n, i], common.y_word(t, common_index).to_vec());
            elements.push(common.povm().element(common.outcome_index(common_index, k, t)).clone());
        }
    }
    ConferencingCode::new(common.blocklength(), protocol.clone(), f, g, Povm::new(elements)?)
}

/// `(1/(M N)) Σ tr(D_{m,n} W^{⊗l}(f_l(C(m,n)), g_l(D(m,n))))`, evaluated exactly.
pub fn success_probability_conf(code: &ConferencingCode, w: &CcqMac, policy: ResidualPolicy, budget: &Budget) -> Result<f64> {
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
    let (ms, ns) = code.messages();
    let per_message = map_range(ms, |m| -> Result<f64> {
        let mut acc = 0.0;
        for n in 0..ns {
            let (x, y) = code.codewords(m, n)?;
            let rho = w.tensor_power_output(x, y, budget)?;
            acc += trace_pair(povm.element(m * ns + n), &rho)?;
        }
        Ok(acc)
    });
    let mut total = 0.0;
    for value in per_message {
        total += value?;
    }
    Ok(total / (ms * ns) as f64)
}

/// A conferencing code and the common-message code it was reduced from.
#[derive(Clone, Debug)]
pub struct AssembledConferencingCode {
    pub code: ConferencingCode,
    pub source: AssembledCode,
}

/// Parameters of a randomly assembled conferencing code.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConferencingParams {
    pub l: usize,
    pub m_size: usize,
    pub n_size: usize,
    /// Conference budgets in bits per channel use.
    pub c: f64,
    pub d: f64,
    pub delta: Option<f64>,
    pub seed: u64,
}

/// One-step conference plus a random common-message code for the cell pairs.
pub fn assemble_conferencing_code(
    w: &CcqMac,
    law: &InputLaw,
    params: &ConferencingParams,
    budget: &Budget,
) -> Result<AssembledConferencingCode> {
    let ConferencingParams {
        l,
        m_size,
        n_size,
        c,
        d,
        delta,
        seed,
    } = *params;
    let protocol = willems_one_step(m_size, n_size, c, d, l)?;
    let (pm, pn) = protocol.one_step_partitions().expect("one-step protocol");
    let params = CodeParams {
        l,
        m: pm.cells() * pn.cells(),
        k: pm.max_cell_size(),
        t: pn.max_cell_size(),
        delta,
        seed,
    };
    let source = assemble_common_code(w, law, &params, budget)?;
    let code = conferencing_code_from_common(&source.code, &protocol)?;
    Ok(AssembledConferencingCode { code, source })
}
