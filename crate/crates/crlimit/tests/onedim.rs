//! The one-dimensional pipeline against its closed-form limit.

use crlimit::nls_bridge::Sign;
use crlimit::onedim_limit::*;
use num_complex::Complex64 as C64;

fn envelope(xi: f64) -> C64 {
    C64::new((-xi * xi / 2.0).exp(), 0.3 * xi * (-xi * xi).exp())
}

#[test]
fn every_mode_follows_the_closed_form() {
    for sign in [Sign::Focusing, Sign::Defocusing] {
        let b0 = Lattice1D::from_fn(32, 4.0, envelope).unwrap();
        let run = onedim_resonant_evolve(&b0, 0.05, sign, 400.0, OneDimStepper::Rotation { steps: 64 }).unwrap();
        assert!(run.closed_form_error < 1e-12, "{}", run.closed_form_error);
        for (a, b) in b0.values.iter().zip(&run.c.values) {
            assert!((a.norm() - b.norm()).abs() < 1e-13);
        }
    }
}

#[test]
fn continuum_gap_decays_like_the_mesh_squared() {
    let rows = onedim_scan(&envelope, &[16, 32, 64, 128], 0.1, Sign::Focusing, 1.5, 5.0, OneDimStepper::Rotation { steps: 32 }).unwrap();
    for w in rows.windows(2) {
        let ratio = w[0].continuum_gap / w[1].continuum_gap;
        assert!((3.0..5.0).contains(&ratio), "{rows:?}");
    }
}

#[test]
fn nls_pipeline_approaches_the_limit_as_eps_shrinks() {
    let errs: Vec<f64> = [0.4, 0.2, 0.1]
        .iter()
        .map(|&eps| onedim_nls_pipeline(&envelope, 4, eps, Sign::Focusing, 0.5, 3.0, 64, 1e-3).unwrap())
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}
