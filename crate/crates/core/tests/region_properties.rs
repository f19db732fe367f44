mod common;

use ccqmac_core::{
    conferencing_bounds, holevo_terms, region_frontier, region_grid, support_maximize, CcqMac, DensityMatrix,
    FrontierSettings, OptimizerSettings, RegionMode,
};
use common::*;
use proptest::prelude::*;

fn settings(starts: usize, n: usize) -> FrontierSettings {
    FrontierSettings {
        n_directions: Some(n),
        optimizer: OptimizerSettings {
            starts,
            seed: 17,
            ..OptimizerSettings::default()
        },
    }
}

/// Z = X + Y on a three-level register.
fn binary_adder() -> CcqMac {
    let states = (0..4).map(|i| DensityMatrix::basis(3, i / 2 + i % 2)).collect();
    CcqMac::from_states(2, 2, states).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bounds_equal_recomputation(seed in any::<u64>(), c in 0.0f64..2.0, d in 0.0f64..2.0) {
        let mut r = rng(seed);
        let w = random_mac(&mut r, 2, 2, 2);
        let law = random_law(&mut r, 3, 2, 2);
        let b = conferencing_bounds(&w, &law, c, d).unwrap();
        let o = oracle_terms(&w, &law);
        prop_assert!((b.single_x - o[0] - c).abs() < 1e-10);
        prop_assert!((b.single_y - o[1] - d).abs() < 1e-10);
        prop_assert!((b.sum_cond - o[2] - c - d).abs() < 1e-10);
        prop_assert!((b.sum - o[3]).abs() < 1e-10);
    }
}

#[test]
fn adder_without_conference_is_the_classical_pentagon() {
    let w = binary_adder();
    let region = region_frontier(&w, RegionMode::Conferencing { c: 0.0, d: 0.0 }, &settings(16, 12)).unwrap();
    for (dir, h) in region.outer_halfspaces() {
        let (a, b) = (dir[0], dir[1]);
        let expected = [a + 0.5 * b, 0.5 * a + b, a, b].into_iter().fold(0.0, f64::max);
        assert!((h - expected).abs() < 3e-3, "direction {dir:?}: {h} vs {expected}");
    }
}

#[test]
fn adder_with_full_cooperation_reaches_log_three() {
    let w = binary_adder();
    let mode = RegionMode::Conferencing { c: 1.0, d: 1.0 };
    let res = support_maximize(&w, &[1.0, 1.0], mode, &settings(16, 3).optimizer).unwrap();
    assert!((res.value - 3f64.log2()).abs() < 1e-3, "{}", res.value);
}

#[test]
fn supports_grow_with_the_budgets() {
    let mut r = rng(5);
    let w = random_mac(&mut r, 2, 2, 2);
    let budgets = [(0.0, 0.0), (0.3, 0.0), (0.3, 0.3)];
    let modes: Vec<_> = budgets.iter().map(|&(c, d)| RegionMode::Conferencing { c, d }).collect();
    let regions = region_grid(&w, &modes, &settings(8, 8)).unwrap();
    for pair in regions.windows(2) {
        for (a, b) in pair[0].support_values.iter().zip(&pair[1].support_values) {
            assert!(*a <= b + 1e-9);
        }
    }
}

#[test]
fn sum_rate_never_exceeds_the_joint_capacity() {
    let mut r = rng(6);
    let w = random_mac(&mut r, 2, 2, 2);
    let states: Vec<_> = w.outputs().iter().map(|d| d.matrix()).collect();
    let (_, upper) = blahut_arimoto(&states, 3000);
    for budget in [0.0, 0.5, 5.0] {
        let mode = RegionMode::Conferencing { c: budget, d: budget };
        let res = support_maximize(&w, &[1.0, 1.0], mode, &settings(8, 3).optimizer).unwrap();
        assert!(res.value <= upper + 1e-6);
        let terms = holevo_terms(&w, &res.law).unwrap();
        assert!(res.value <= terms.xy + 1e-12);
    }
}

#[test]
fn region_inner_points_lie_under_every_halfspace() {
    let mut r = rng(7);
    let w = random_mac(&mut r, 2, 2, 3);
    let region = region_frontier(&w, RegionMode::Common, &settings(4, 20)).unwrap();
    for p in &region.inner_points {
        assert!(p.as_slice().iter().all(|&x| x >= 0.0));
        for (d, h) in region.outer_halfspaces() {
            assert!(p.dot(d) <= h + 1e-6);
        }
    }
}
