//! The continuous resonant flow on the Hermite basis: fixed points,
//! symmetries, the Gaussian bound and conservation order.

use std::f64::consts::PI;

use crlimit::cr_dynamics::{evolve_expansion, Expansion};
use crlimit::hermite::{self, HermiteEngine};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_coeffs(levels: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c: Vec<C64> = (0..hermite::dimension(levels))
        .map(|i| {
            let (n, m) = hermite::pair_of(i);
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (-0.4 * (n + m) as f64).exp()
        })
        .collect();
    let norm = hermite::mass(&c).sqrt();
    c.iter_mut().for_each(|v| *v /= norm);
    c
}

fn ground(levels: usize) -> Vec<C64> {
    let mut c = vec![C64::new(0.0, 0.0); hermite::dimension(levels)];
    c[0] = C64::new(1.0, 0.0);
    c
}

#[test]
fn gaussian_is_an_eigenfunction_with_rate_pi_over_two() {
    let engine = HermiteEngine::new(8).unwrap();
    let g = ground(8);
    let tg = engine.cubic(&g);
    for (i, v) in tg.iter().enumerate() {
        let want = if i == 0 { PI / 2.0 } else { 0.0 };
        assert!((v - want).norm() < 1e-12, "slot {i}: {v}");
    }
    assert!((engine.hamiltonian(&g) - PI / 8.0).abs() < 1e-13);
}

#[test]
fn hamiltonian_is_invariant_under_phase_fourier_and_reflection() {
    let levels = 10;
    let engine = HermiteEngine::new(levels).unwrap();
    let c = random_coeffs(levels, 3);
    let h = engine.hamiltonian(&c);
    let phase: Vec<C64> = c.iter().map(|v| v * C64::from_polar(1.0, 1.1)).collect();
    let swap: Vec<C64> = (0..c.len())
        .map(|i| {
            let (n, m) = hermite::pair_of(i);
            c[hermite::index_of(m, n)]
        })
        .collect();
    let fourier = Expansion { levels, scale: 1.0, coeffs: c.clone() }.fourier().coeffs;
    for other in [phase, swap, fourier] {
        assert!((engine.hamiltonian(&other) - h).abs() < 1e-12 * h.abs());
    }
}

#[test]
fn unit_mass_data_never_beat_the_gaussian() {
    let levels = 10;
    let engine = HermiteEngine::new(levels).unwrap();
    let best = engine.hamiltonian(&ground(levels));
    for seed in 0..20 {
        let h = engine.hamiltonian(&random_coeffs(levels, 100 + seed));
        assert!(h <= best + 1e-12, "seed {seed}: {h} > {best}");
    }
}

#[test]
fn operator_is_hermitian_in_the_outer_slots() {
    // ⟨T(f,g,h), k⟩ = ⟨f, T(k,h,g)⟩ for the four-linear form.
    let levels = 8;
    let engine = HermiteEngine::new(levels).unwrap();
    let [f, g, h, k] = [1, 2, 3, 4].map(|s| random_coeffs(levels, s));
    let lhs = hermite::inner(&engine.apply(&f, &g, &h), &k);
    let rhs = hermite::inner(&f, &engine.apply(&k, &h, &g));
    assert!((lhs - rhs).norm() < 1e-12);
}

#[test]
fn conservation_error_is_fourth_order_in_the_step() {
    // Fast coefficient decay keeps the truncation leak far below the
    // time-stepping error being measured.
    let levels = 16;
    let mut coeffs = random_coeffs(levels, 9);
    for (i, v) in coeffs.iter_mut().enumerate() {
        let (n, m) = hermite::pair_of(i);
        *v *= (-0.8 * (n + m) as f64).exp();
    }
    let e0 = Expansion { levels, scale: 1.0, coeffs };
    let drift = |dt: f64| {
        let tr = evolve_expansion(&e0, 1.0, dt, usize::MAX).unwrap();
        tr.ledger.last().unwrap().max_relative_deviation(&tr.ledger[0], 1e-3)
    };
    let (coarse, fine) = (drift(0.04), drift(0.02));
    assert!(coarse < 1e-6, "{coarse}");
    assert!(coarse / fine > 12.0, "ratio {}", coarse / fine);
}
