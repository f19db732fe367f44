#![allow(dead_code)]

use ccqmac_core::{CcqMac, ComplexMatrix, DensityMatrix, Distribution, InputLaw, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// `G G† / tr`, `G` a `dim × rank` complex Gaussian matrix.
pub fn random_state<R: Rng>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| C64::new(gaussian(rng), gaussian(rng)));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.map(|z| z / tr)).unwrap()
}

pub fn random_mac<R: Rng>(rng: &mut R, xs: usize, ys: usize, dim: usize) -> CcqMac {
    let states = (0..xs * ys)
        .map(|_| {
            let rank = rng.random_range(1..=dim);
            random_state(rng, dim, rank)
        })
        .collect();
    CcqMac::from_states(xs, ys, states).unwrap()
}

/// Random simplex point; with probability 1/4 one coordinate is zeroed.
pub fn random_distribution<R: Rng>(rng: &mut R, n: usize) -> Distribution {
    let mut w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    if n > 1 && rng.random::<f64>() < 0.25 {
        let i = rng.random_range(0..n);
        w[i] = 0.0;
    }
    Distribution::normalized(w).unwrap()
}

pub fn random_law<R: Rng>(rng: &mut R, u: usize, xs: usize, ys: usize) -> InputLaw {
    let p = random_distribution(rng, u);
    let r = (0..u).map(|_| random_distribution(rng, xs)).collect();
    let s = (0..u).map(|_| random_distribution(rng, ys)).collect();
    InputLaw::new(p, r, s).unwrap()
}

pub fn random_diagonal_mac<R: Rng>(rng: &mut R, xs: usize, ys: usize, dim: usize) -> (CcqMac, Vec<Vec<f64>>) {
    let rows: Vec<Vec<f64>> = (0..xs * ys).map(|_| random_distribution(rng, dim).into_vec()).collect();
    let states = rows.iter().map(|q| DensityMatrix::diagonal(q).unwrap()).collect();
    (CcqMac::from_states(xs, ys, states).unwrap(), rows)
}

/// Entropy from a general Hermitian eigensolver.
pub fn oracle_entropy(m: &ComplexMatrix) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.log2())
        .sum()
}

pub fn oracle_holevo(weights: &[f64], states: &[&ComplexMatrix]) -> f64 {
    let dim = states[0].nrows();
    let mut avg = ComplexMatrix::zeros(dim, dim);
    let mut mean = 0.0;
    for (&w, s) in weights.iter().zip(states) {
        avg += s.map(|z| z * w);
        mean += w * oracle_entropy(s);
    }
    oracle_entropy(&avg) - mean
}

/// `χ(X;Q|Y,U), χ(Y;Q|X,U), χ(X,Y;Q|U), χ(X,Y;Q), χ(X;Q|U), χ(Y;Q|U)`.
pub fn oracle_terms(w: &CcqMac, law: &InputLaw) -> [f64; 6] {
    let (xs, ys, dim) = (w.x_size(), w.y_size(), w.dim());
    let mut out = [0.0; 6];
    let mut joint = vec![0.0; xs * ys];
    for u in 0..law.u_size() {
        let pu = law.p().get(u);
        let r = law.r(u).as_slice();
        let s = law.s(u).as_slice();
        for (y, &sy) in s.iter().enumerate() {
            let states: Vec<&ComplexMatrix> = (0..xs).map(|x| w.output(x, y).matrix()).collect();
            out[0] += pu * sy * oracle_holevo(r, &states);
        }
        for (x, &rx) in r.iter().enumerate() {
            let states: Vec<&ComplexMatrix> = (0..ys).map(|y| w.output(x, y).matrix()).collect();
            out[1] += pu * rx * oracle_holevo(s, &states);
        }
        let rs: Vec<f64> = (0..xs * ys).map(|i| r[i / ys] * s[i % ys]).collect();
        let all: Vec<&ComplexMatrix> = w.outputs().iter().map(|d| d.matrix()).collect();
        out[2] += pu * oracle_holevo(&rs, &all);
        for i in 0..xs * ys {
            joint[i] += pu * rs[i];
        }
        let x_avg: Vec<ComplexMatrix> = (0..xs)
            .map(|x| {
                let mut m = ComplexMatrix::zeros(dim, dim);
                for (y, &sy) in s.iter().enumerate() {
                    m += w.output(x, y).matrix().map(|z| z * sy);
                }
                m
            })
            .collect();
        out[4] += pu * oracle_holevo(r, &x_avg.iter().collect::<Vec<_>>());
        let y_avg: Vec<ComplexMatrix> = (0..ys)
            .map(|y| {
                let mut m = ComplexMatrix::zeros(dim, dim);
                for (x, &rx) in r.iter().enumerate() {
                    m += w.output(x, y).matrix().map(|z| z * rx);
                }
                m
            })
            .collect();
        out[5] += pu * oracle_holevo(s, &y_avg.iter().collect::<Vec<_>>());
    }
    let all: Vec<&ComplexMatrix> = w.outputs().iter().map(|d| d.matrix()).collect();
    out[3] = oracle_holevo(&joint, &all);
    out
}

fn h(ps: impl Iterator<Item = f64>) -> f64 {
    ps.filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum()
}

/// Classical mutual informations of a diagonal MAC from the joint table
/// `P(u,x,y,z) = p(u) r(x|u) s(y|u) q(z|x,y)`:
/// `I(X;Z|Y,U), I(Y;Z|X,U), I(X,Y;Z|U), I(X,Y;Z)`.
pub fn classical_informations(rows: &[Vec<f64>], xs: usize, ys: usize, law: &InputLaw) -> [f64; 4] {
    let dz = rows[0].len();
    let q = |x: usize, y: usize, z: usize| rows[x * ys + y][z];
    let nu = law.u_size();
    let table = |u: usize, x: usize, y: usize, z: usize| law.joint(u, x, y) * q(x, y, z);
    // H(Z | A) = H(A, Z) - H(A) for A a subset of (U, X, Y).
    let marg = |keep_u: bool, keep_x: bool, keep_y: bool, keep_z: bool| {
        let mut m = std::collections::BTreeMap::<(usize, usize, usize, usize), f64>::new();
        for u in 0..nu {
            for x in 0..xs {
                for y in 0..ys {
                    for z in 0..dz {
                        let key = (
                            if keep_u { u } else { 0 },
                            if keep_x { x } else { 0 },
                            if keep_y { y } else { 0 },
                            if keep_z { z } else { 0 },
                        );
                        *m.entry(key).or_default() += table(u, x, y, z);
                    }
                }
            }
        }
        h(m.into_values())
    };
    let cond = |ku, kx, ky| marg(ku, kx, ky, true) - marg(ku, kx, ky, false);
    let z_given_uxy = cond(true, true, true);
    [
        cond(true, false, true) - z_given_uxy,
        cond(true, true, false) - z_given_uxy,
        cond(true, false, false) - z_given_uxy,
        cond(false, false, false) - cond(false, true, true),
    ]
}

fn log_on_support(m: &ComplexMatrix) -> ComplexMatrix {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        if v > 1e-14 {
            let col = eig.eigenvectors.column(i);
            out += col * col.adjoint() * C64::new(v.ln(), 0.0);
        }
    }
    out
}

/// `D(ρ‖σ)` in nats, assuming `supp ρ ⊆ supp σ`.
fn relative_entropy(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> f64 {
    let diff = log_on_support(rho) - log_on_support(sigma);
    (rho * diff).trace().re
}

/// Capacity of the cq-channel `x ↦ states[x]` in bits by the quantum
/// Blahut–Arimoto iteration; returns (lower, upper) bounds.
pub fn blahut_arimoto(states: &[&ComplexMatrix], iterations: usize) -> (f64, f64) {
    let n = states.len();
    let dim = states[0].nrows();
    let mut p = vec![1.0 / n as f64; n];
    let mut bounds = (0.0, f64::INFINITY);
    for _ in 0..iterations {
        let mut avg = ComplexMatrix::zeros(dim, dim);
        for (w, s) in p.iter().zip(states) {
            avg += s.map(|z| z * *w);
        }
        let d: Vec<f64> = states.iter().map(|s| relative_entropy(s, &avg)).collect();
        let lower: f64 = p.iter().zip(&d).map(|(a, b)| a * b).sum();
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        bounds = (lower / std::f64::consts::LN_2, upper / std::f64::consts::LN_2);
        let weights: Vec<f64> = p.iter().zip(&d).map(|(a, b)| a * b.exp()).collect();
        let total: f64 = weights.iter().sum();
        p = weights.into_iter().map(|x| x / total).collect();
    }
    bounds
}
