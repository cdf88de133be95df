//! Lattice enumeration, density and `T_L` checked against brute force.

mod common;

use common::*;
use crlimit::lattice_resonance::*;
use num_complex::Complex64 as C64;

#[test]
fn resonant_enumeration_matches_brute_force_as_multisets() {
    for l in 1..=3u32 {
        let params = LatticeParams::new(l, 2.0, 3.0).unwrap();
        for k in params.ball() {
            let mut fast: Vec<[Idx; 3]> =
                enumerate_resonant(k, &params, true).unwrap().into_iter().map(|t| [t.k1, t.k2, t.k3]).collect();
            fast.sort();
            assert_eq!(fast, brute_level_set(k, 0, &params), "L = {l}, k = {k:?}");
        }
    }
}

#[test]
fn enumerated_tuples_are_rectangles() {
    let params = LatticeParams::new(3, 2.0, 3.0).unwrap();
    for t in enumerate_resonant([2, -1], &params, true).unwrap() {
        assert_eq!(t.omega_scaled(), 0);
        let (n1, n3) = (t.n1(), t.n3());
        assert_eq!(n1[0] * n3[0] + n1[1] * n3[1], 0);
    }
}

#[test]
fn level_sets_match_brute_force() {
    let params = LatticeParams::new(2, 2.0, 3.0).unwrap();
    for m in -3..=3 {
        for k in [[0, 0], [1, 2], [-3, 1], [4, 0]] {
            let mut fast = enumerate_level_set(k, LevelSetKey::from_m(m, 2), &params).unwrap();
            fast.sort();
            assert_eq!(fast, brute_level_set(k, m, &params), "m = {m}, k = {k:?}");
        }
    }
    assert!(enumerate_level_set([0, 0], LevelSetKey::from_mu(0.3, 2), &params).unwrap().is_empty());
}

#[test]
fn visible_density_matches_direct_count() {
    for n in [1, 2, 5, 17, 60] {
        assert!((visible_density(n as u64).unwrap() - brute_visible_density(n)).abs() < 1e-14, "N = {n}");
    }
    assert_eq!(visible_density(1).unwrap(), 1.0);
}

#[test]
fn t_l_matches_direct_sum() {
    let params = LatticeParams::new(3, 1.5, 3.0).unwrap();
    let e = random_lattice_field(params, 1);
    let f = random_lattice_field(params, 2);
    let g = random_lattice_field(params, 3);
    let full = t_l_apply(&e, &f, &g).unwrap();
    for k in params.ball() {
        let want = brute_t_l(&e, &f, &g, k);
        assert!((full.get(k) - want).norm() < 1e-12 * (1.0 + want.norm()), "k = {k:?}");
    }
}

#[test]
fn t_l_commutes_with_lattice_symmetries_and_swaps_outer_slots() {
    let params = LatticeParams::new(3, 2.0, 3.0).unwrap();
    let a = random_lattice_field(params, 7);
    let b = random_lattice_field(params, 8);
    let ta = t_l_apply(&a, &a, &a).unwrap();
    for image in 1..8 {
        let act = |k: Idx| d4_images(k)[image];
        let rotated = LatticeField::from_index_fn(params, |k| {
            // Pull back through the group element: find q with act(q) = k.
            params.ball().into_iter().find(|&q| act(q) == k).map(|q| a.get(q)).unwrap_or_default()
        });
        let tr = t_l_apply(&rotated, &rotated, &rotated).unwrap();
        for k in params.ball() {
            assert!((tr.get(act(k)) - ta.get(k)).norm() < 1e-12);
        }
    }
    let x = t_l_apply(&a, &b, &b).unwrap();
    let y = t_l_apply(&b, &b, &a).unwrap();
    assert!(sup_distance(&x, &y) < 1e-13);
}

#[test]
fn t_l_is_gauge_covariant_and_cubic() {
    let params = LatticeParams::new(4, 1.5, 3.0).unwrap();
    let a = random_lattice_field(params, 11);
    let ta = t_l_apply(&a, &a, &a).unwrap();
    let rot = C64::from_polar(1.0, 0.7);
    let tr = t_l_apply(&a.scaled(rot), &a.scaled(rot), &a.scaled(rot)).unwrap();
    assert!(sup_distance(&tr, &ta.scaled(rot)) < 1e-13);
    let t2 = t_l_apply(&a.scaled(C64::new(2.0, 0.0)), &a.scaled(C64::new(2.0, 0.0)), &a.scaled(C64::new(2.0, 0.0))).unwrap();
    assert!(sup_distance(&t2, &ta.scaled(C64::new(8.0, 0.0))) < 1e-12);
}

#[test]
fn symmetric_shortcut_agrees_with_full_evaluation() {
    let params = LatticeParams::new(4, 2.0, 3.0).unwrap();
    let g = gaussian_trace(params);
    assert!(g.is_d4_symmetric());
    let fast = t_l_cubic_symmetric(&g).unwrap();
    let full = t_l_apply(&g, &g, &g).unwrap();
    assert!(sup_distance(&fast, &full) < 1e-14);
}

#[test]
fn strichartz_sum_of_two_modes_is_six() {
    let params = LatticeParams::new(1, 6.0, 0.0).unwrap();
    for (a, b) in [([0, 0], [1, 0]), ([2, 1], [-1, 3]), ([0, 2], [0, -2])] {
        let phi = LatticeField::from_index_fn(params, |k| if k == a || k == b { C64::new(1.0, 0.0) } else { C64::default() });
        assert!((strichartz_sum(&phi, 3).unwrap() - 6.0).abs() < 1e-12);
    }
}

#[test]
fn strichartz_sum_matches_brute_force_quartic_sum() {
    let params = LatticeParams::new(1, 4.0, 0.0).unwrap();
    let phi = random_lattice_field(params, 5);
    let mut want = C64::default();
    for k in params.ball() {
        for [k1, k2, k3] in brute_level_set(k, 0, &params) {
            want += phi.get(k1) * phi.get(k2).conj() * phi.get(k3) * phi.get(k).conj();
        }
    }
    assert!((strichartz_sum(&phi, 2).unwrap() - want.re).abs() < 1e-10 * want.norm());
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn enumeration_matches_brute_force_for_any_ball(l in 1u32..=4, cutoff in 0.5f64..2.0, kx in -6i64..=6, ky in -6i64..=6) {
            let params = LatticeParams::new(l, cutoff, 3.0).unwrap();
            let k = [kx, ky];
            prop_assume!(params.contains(k));
            let mut fast: Vec<[Idx; 3]> =
                enumerate_resonant(k, &params, true).unwrap().into_iter().map(|t| [t.k1, t.k2, t.k3]).collect();
            fast.sort();
            prop_assert_eq!(fast, brute_level_set(k, 0, &params));
        }

        #[test]
        fn visible_density_matches_direct_count_for_any_n(n in 1i64..=80) {
            prop_assert!((visible_density(n as u64).unwrap() - brute_visible_density(n)).abs() < 1e-14);
        }
    }
}
