//! The NLS solver, the resonant system and the box/torus experiments.

mod common;

use common::*;
use crlimit::cr_operator::{gaussian, GridField};
use crlimit::lattice_resonance::{t_l_apply, LatticeParams};
use crlimit::nls_bridge::*;
use num_complex::Complex64 as C64;

fn gaussian_field() -> GridField {
    GridField::from_closure(8.0, 16, |p| C64::new(gaussian(p), 0.0)).unwrap()
}

#[test]
fn splitting_keeps_mass_over_ten_thousand_steps() {
    let params = LatticeParams::new(4, 3.0, 3.0).unwrap();
    let a0 = random_lattice_field(params, 21);
    let cfg = NlsConfig { l: 4, eps: 0.5, sign: Sign::Focusing, modes: 32, dt: 1e-3, padded: false };
    let solver = NlsSolver::new(cfg).unwrap();
    let mut a = solver.to_spectral(&a0).unwrap();
    let m0 = solver.mass(&a);
    for _ in 0..10_000 {
        solver.step(&mut a, cfg.dt);
    }
    assert!((solver.mass(&a) - m0).abs() < 1e-10 * m0);
}

#[test]
fn resonant_system_first_step_matches_direct_operator() {
    // A short step departs from b + i ε² ds T_L(b) only at second order.
    let params = LatticeParams::new(3, 1.5, 3.0).unwrap();
    let b0 = random_lattice_field(params, 4);
    let cfg = NlsConfig { l: 3, eps: 1.0, sign: Sign::Defocusing, modes: 16, dt: 1e-3, padded: false };
    let tb = t_l_apply(&b0, &b0, &b0).unwrap();
    let defect = |ds: f64| {
        let tr = rs_evolve(&b0, &cfg, ds, ds, 1).unwrap();
        sup_distance(tr.states.last().unwrap(), &b0.add_scaled(&tb, C64::new(0.0, ds)))
    };
    let ratio = defect(2e-3) / defect(1e-3);
    assert!((ratio - 4.0).abs() < 0.05, "{ratio}");
}

#[test]
fn resonant_system_conserves_mass_and_hamiltonian_without_symmetry() {
    let params = LatticeParams::new(3, 1.5, 3.0).unwrap();
    let b0 = random_lattice_field(params, 5);
    let cfg = NlsConfig { l: 3, eps: 1.0, sign: Sign::Defocusing, modes: 16, dt: 1e-3, padded: false };
    let tr = rs_evolve(&b0, &cfg, 2.0, 0.01, 50).unwrap();
    let (m0, h0) = (tr.mass[0], tr.hamiltonian[0]);
    for (m, h) in tr.mass.iter().zip(&tr.hamiltonian) {
        assert!((m - m0).abs() < 1e-6 * m0);
        assert!((h - h0).abs() < 1e-6 * h0.abs());
    }
}

#[test]
fn non_resonant_part_shrinks_with_eps() {
    let mut run = ApproxRun::new(gaussian_field(), 0.1);
    run.samples = 2;
    run.rs_dt = 0.025;
    let mut last = Vec::new();
    for eps in [0.2, 0.1] {
        let cfg = NlsConfig { l: 4, eps, sign: Sign::Defocusing, modes: 64, dt: 2e-3, padded: false };
        let rep = approx_experiment(&run, &cfg).unwrap();
        let split = rep.full_vs_resonant.as_ref().unwrap();
        let full = rep.err_full.as_ref().unwrap();
        let rs = rep.err_resonant.as_ref().unwrap();
        let i = split.len() - 1;
        assert!(split[i] <= full[i] + rs[i] + 1e-12);
        assert!(rep.mass_drift.as_ref().unwrap().iter().all(|d| d.abs() < 1e-10));
        last.push(split[i]);
    }
    assert!(last[1] < last[0], "{last:?}");
}

#[test]
fn torus_datum_norm_tracks_the_homogeneous_weight() {
    let g = gaussian_field();
    let (inhomogeneous, homogeneous) = weighted_l2_norms(&g, 1.5);
    let setup = unit_torus_rescale(&g, 16, 1.5, Sign::Defocusing, 6.0, 1e-3).unwrap();
    assert!((setup.hs_norm / homogeneous - 1.0).abs() < 0.2);
    assert!((setup.hs_norm / inhomogeneous - 1.0).abs() > 0.2);
}
