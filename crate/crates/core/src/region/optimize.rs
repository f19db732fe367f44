//! Multistart local search over factored input laws.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::channel::CcqMac;
use crate::error::{Error, Result};
use crate::info::{holevo_terms, mix_matrices, output_entropies, HolevoTerms, InputLaw};
use crate::linalg::{entropy_of_state_matrix, ComplexMatrix};
use crate::rng::{flat_simplex, substream, TAG_OPTIMIZER_START};

use super::{check_direction, RatePoint, RegionMode};

/// Improvements smaller than this are treated as no progress.
const MIN_GAIN: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerSettings {
    /// Random starting laws per direction.
    pub starts: usize,
    pub seed: u64,
    /// Auxiliary alphabet size; `None` means `|X||Y| + 3`.
    pub u_size: Option<usize>,
    pub initial_step: f64,
    pub min_step: f64,
    /// Cap on coordinate sweeps per local search.
    pub max_sweeps: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            starts: 64,
            seed: 0,
            u_size: None,
            initial_step: 0.1,
            min_step: 1e-6,
            max_sweeps: 4000,
        }
    }
}

impl OptimizerSettings {
    pub fn resolved_u_size(&self, w: &CcqMac) -> usize {
        self.u_size.unwrap_or(w.x_size() * w.y_size() + 3)
    }

    fn validate(&self) -> Result<()> {
        if self.u_size == Some(0) {
            return Err(Error::InvalidParameter("auxiliary alphabet must be nonempty".into()));
        }
        if !(self.initial_step > 0.0 && self.min_step > 0.0 && self.min_step <= self.initial_step) {
            return Err(Error::InvalidParameter(alloc::format!(
                "step schedule {} -> {} is not decreasing and positive",
                self.initial_step,
                self.min_step
            )));
        }
        Ok(())
    }
}

/// Best law found for one direction.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportResult {
    pub value: f64,
    pub law: InputLaw,
    /// Vertex of the law's polytope attaining `value`.
    pub point: RatePoint,
    pub terms: HolevoTerms,
}

/// Per-symbol contributions of `u` to the four Holevo quantities.
#[derive(Clone)]
struct SymbolCache {
    x_given_y: f64,
    y_given_x: f64,
    xy: f64,
    mean_state: ComplexMatrix,
    mean_entropy: f64,
}

struct Model<'a> {
    w: &'a CcqMac,
    entropies: Vec<f64>,
}

impl<'a> Model<'a> {
    fn new(w: &'a CcqMac) -> Self {
        Self {
            w,
            entropies: output_entropies(w),
        }
    }

    fn symbol_cache(&self, r: &[f64], s: &[f64]) -> SymbolCache {
        let w = self.w;
        let (xs, ys, dim) = (w.x_size(), w.y_size(), w.dim());
        let ent = &self.entropies;
        let mut x_given_y = 0.0;
        for y in 0..ys {
            if s[y] == 0.0 {
                continue;
            }
            let avg = mix_matrices(dim, (0..xs).map(|x| (r[x], w.output(x, y).matrix())));
            let mean: f64 = (0..xs).map(|x| r[x] * ent[x * ys + y]).sum();
            x_given_y += s[y] * (entropy_of_state_matrix(&avg) - mean);
        }
        let mut y_given_x = 0.0;
        for x in 0..xs {
            if r[x] == 0.0 {
                continue;
            }
            let avg = mix_matrices(dim, (0..ys).map(|y| (s[y], w.output(x, y).matrix())));
            let mean: f64 = (0..ys).map(|y| s[y] * ent[x * ys + y]).sum();
            y_given_x += r[x] * (entropy_of_state_matrix(&avg) - mean);
        }
        let weight = |i: usize| r[i / ys] * s[i % ys];
        let mean_state = mix_matrices(dim, (0..xs * ys).map(|i| (weight(i), w.outputs()[i].matrix())));
        let mean_entropy: f64 = (0..xs * ys).map(|i| weight(i) * ent[i]).sum();
        SymbolCache {
            x_given_y,
            y_given_x,
            xy: entropy_of_state_matrix(&mean_state) - mean_entropy,
            mean_state,
            mean_entropy,
        }
    }
}

#[derive(Clone)]
struct LawState {
    p: Vec<f64>,
    r: Vec<Vec<f64>>,
    s: Vec<Vec<f64>>,
    cache: Vec<SymbolCache>,
}

impl LawState {
    fn new(model: &Model<'_>, p: Vec<f64>, r: Vec<Vec<f64>>, s: Vec<Vec<f64>>) -> Self {
        let cache = r.iter().zip(&s).map(|(r, s)| model.symbol_cache(r, s)).collect();
        Self { p, r, s, cache }
    }

    fn from_law(model: &Model<'_>, law: &InputLaw) -> Self {
        let n = law.u_size();
        Self::new(
            model,
            law.p().as_slice().to_vec(),
            (0..n).map(|u| law.r(u).as_slice().to_vec()).collect(),
            (0..n).map(|u| law.s(u).as_slice().to_vec()).collect(),
        )
    }

    fn terms(&self, dim: usize) -> HolevoTerms {
        let mut t = HolevoTerms {
            x_given_yu: 0.0,
            y_given_xu: 0.0,
            xy_given_u: 0.0,
            xy: 0.0,
        };
        let mut mean_entropy = 0.0;
        for (&pu, c) in self.p.iter().zip(&self.cache) {
            if pu == 0.0 {
                continue;
            }
            t.x_given_yu += pu * c.x_given_y;
            t.y_given_xu += pu * c.y_given_x;
            t.xy_given_u += pu * c.xy;
            mean_entropy += pu * c.mean_entropy;
        }
        let avg = mix_matrices(dim, self.p.iter().copied().zip(self.cache.iter().map(|c| &c.mean_state)));
        t.xy = entropy_of_state_matrix(&avg) - mean_entropy;
        t
    }

    fn into_law(self) -> InputLaw {
        InputLaw::from_raw_parts(self.p, self.r, self.s)
    }
}

#[derive(Clone, Copy)]
enum Block {
    P,
    R(usize),
    S(usize),
}

struct Search<'m, 'w> {
    model: &'m Model<'w>,
    mode: RegionMode,
    direction: &'m [f64],
}

impl Search<'_, '_> {
    fn objective(&self, state: &LawState) -> f64 {
        let bounds = self.mode.bounds(&state.terms(self.model.w.dim()));
        bounds.support(self.mode, self.direction).map(|(v, _)| v).unwrap_or(f64::NEG_INFINITY)
    }

    /// Try moving `amount` of mass from `i` to `j` in `block`; keep it if it helps.
    fn try_move(&self, state: &mut LawState, block: Block, i: usize, j: usize, step: f64, value: &mut f64) -> bool {
        let row = match block {
            Block::P => &mut state.p,
            Block::R(u) => &mut state.r[u],
            Block::S(u) => &mut state.s[u],
        };
        let amount = step.min(row[i]);
        if amount <= 0.0 {
            return false;
        }
        let (old_i, old_j) = (row[i], row[j]);
        row[i] -= amount;
        row[j] += amount;
        let old_cache = match block {
            Block::P => None,
            Block::R(u) | Block::S(u) => {
                let fresh = self.model.symbol_cache(&state.r[u], &state.s[u]);
                Some((u, core::mem::replace(&mut state.cache[u], fresh)))
            }
        };
        let candidate = self.objective(state);
        if candidate > *value + MIN_GAIN {
            *value = candidate;
            return true;
        }
        let row = match block {
            Block::P => &mut state.p,
            Block::R(u) => &mut state.r[u],
            Block::S(u) => &mut state.s[u],
        };
        row[i] = old_i;
        row[j] = old_j;
        if let Some((u, cache)) = old_cache {
            state.cache[u] = cache;
        }
        false
    }

    fn sweep(&self, state: &mut LawState, step: f64, value: &mut f64) -> bool {
        let mut improved = false;
        let n = state.p.len();
        let mut blocks: Vec<(Block, usize)> = alloc::vec![(Block::P, n)];
        for u in 0..n {
            if state.p[u] > 0.0 {
                blocks.push((Block::R(u), state.r[u].len()));
                blocks.push((Block::S(u), state.s[u].len()));
            }
        }
        for (block, len) in blocks {
            for i in 0..len {
                for j in 0..len {
                    if i != j {
                        improved |= self.try_move(state, block, i, j, step, value);
                    }
                }
            }
        }
        improved
    }

    fn run(&self, mut state: LawState, settings: &OptimizerSettings) -> LawState {
        let mut value = self.objective(&state);
        let mut step = settings.initial_step;
        let mut sweeps = 0;
        while step >= settings.min_step && sweeps < settings.max_sweeps {
            sweeps += 1;
            if !self.sweep(&mut state, step, &mut value) {
                step *= 0.5;
            }
        }
        state
    }
}

fn lexicographic(a: &InputLaw, b: &InputLaw) -> Ordering {
    let (fa, fb) = (a.flatten(), b.flatten());
    for (x, y) in fa.iter().zip(&fb) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    fa.len().cmp(&fb.len())
}

/// Whether `candidate` should replace `best`: larger value, ties to the
/// lexicographically smaller law.
pub(crate) fn better(candidate: &SupportResult, best: &SupportResult) -> bool {
    match candidate.value.total_cmp(&best.value) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => lexicographic(&candidate.law, &best.law) == Ordering::Less,
    }
}

pub(crate) fn evaluate(w: &CcqMac, mode: RegionMode, direction: &[f64], law: InputLaw) -> Result<SupportResult> {
    let terms = holevo_terms(w, &law)?;
    let (value, point) = mode.bounds(&terms).support(mode, direction)?;
    Ok(SupportResult {
        value,
        law,
        point,
        terms,
    })
}

/// Random starting law number `index` for the settings' seed.
pub(crate) fn random_start(w: &CcqMac, settings: &OptimizerSettings, index: usize) -> InputLaw {
    let mut rng = substream(settings.seed, &[TAG_OPTIMIZER_START, index as u64]);
    let n = settings.resolved_u_size(w);
    let p = flat_simplex(&mut rng, n);
    let r = (0..n).map(|_| flat_simplex(&mut rng, w.x_size())).collect();
    let s = (0..n).map(|_| flat_simplex(&mut rng, w.y_size())).collect();
    InputLaw::from_raw_parts(p, r, s)
}

/// Maximize `⟨direction, rate⟩` over the region from random starts only.
pub fn support_maximize(w: &CcqMac, direction: &[f64], mode: RegionMode, settings: &OptimizerSettings) -> Result<SupportResult> {
    support_maximize_from(w, direction, mode, settings, &[])
}

/// Maximize `⟨direction, rate⟩` starting from `warm` laws and `settings.starts`
/// random laws; the returned value is recomputed from scratch for the returned law.
pub fn support_maximize_from(
    w: &CcqMac,
    direction: &[f64],
    mode: RegionMode,
    settings: &OptimizerSettings,
    warm: &[InputLaw],
) -> Result<SupportResult> {
    mode.validate()?;
    settings.validate()?;
    check_direction(direction, mode.dimension())?;
    for law in warm {
        law.check_matches(w)?;
    }
    if warm.is_empty() && settings.starts == 0 {
        return Err(Error::InvalidParameter("optimizer needs at least one start".into()));
    }
    let model = Model::new(w);
    let search = Search {
        model: &model,
        mode,
        direction,
    };
    let starts = warm.iter().cloned().chain((0..settings.starts).map(|i| random_start(w, settings, i)));
    let mut best: Option<SupportResult> = None;
    for law in starts {
        let refined = search.run(LawState::from_law(&model, &law), settings).into_law();
        let result = evaluate(w, mode, direction, refined)?;
        if best.as_ref().is_none_or(|b| better(&result, b)) {
            best = Some(result);
        }
    }
    Ok(best.expect("at least one start"))
}
