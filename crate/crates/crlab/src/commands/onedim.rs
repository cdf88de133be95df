//! `onedim check`.

use anyhow::Result;
use crlimit::nls_bridge::Sign;
use crlimit::onedim_limit::{onedim_nls_pipeline, onedim_resonant_evolve, onedim_scan, Lattice1D, OneDimStepper};
use num_complex::Complex64 as C64;
use serde_json::json;

use super::{outcome, ConfigError};
use crate::cli::OnedimArgs;
use crate::report::{num, Check, Outcome, Table};

/// Per-mode agreement of the gauged resonant flow with its closed form.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-12;
/// `ε` of the continuum scan.
const SCAN_EPS: f64 = 0.1;
/// Frequency cutoff of the continuum scan.
const SCAN_CUTOFF: f64 = 5.0;

/// A smooth, non-real, non-even envelope.
fn envelope(xi: f64) -> C64 {
    C64::new((-xi * xi / 2.0).exp(), 0.3 * xi * (-xi * xi).exp())
}

/// Closed-form checks of the 1D resonant system, its continuum limit and the
/// full 1D NLS.
pub fn check(a: &OnedimArgs) -> Result<Outcome> {
    if a.l_list.is_empty() || a.l_list.contains(&0) || !(a.tau > 0.0) {
        return Err(ConfigError("need a non-empty --l-list of positive sizes and τ > 0".into()).into());
    }
    let mut o = outcome("onedim-check", a)?;
    let mut single = Vec::new();
    for sign in [Sign::Focusing, Sign::Defocusing] {
        let b0 = Lattice1D::from_fn(32, 4.0, envelope)?;
        let run = onedim_resonant_evolve(&b0, 0.05, sign, a.tau / 0.05f64.powi(2), OneDimStepper::Rotation { steps: 64 })?;
        o.checks.push(Check::new(
            format!("closed form ({sign:?})").to_lowercase(),
            run.closed_form_error < CLOSED_FORM_TOLERANCE,
            format!("max_K |c_K(s) − c_K(0)e^{{−iμε²|c_K(0)|²s}}| = {:.2e}", run.closed_form_error),
        ));
        single.push(run.closed_form_error);
    }

    let mut ls = a.l_list.clone();
    ls.sort_unstable();
    let rows = onedim_scan(&envelope, &ls, SCAN_EPS, Sign::Focusing, a.tau, SCAN_CUTOFF, OneDimStepper::Rotation { steps: 32 })?;
    let mut table = Table::new(&["L", "lattice_error", "continuum_gap"]);
    for r in &rows {
        table.push(vec![r.l.to_string(), num(r.lattice_error), num(r.continuum_gap)]);
    }
    let lattice_worst = rows.iter().map(|r| r.lattice_error).fold(0.0, f64::max);
    o.checks.push(Check::new(
        "lattice values",
        lattice_worst < CLOSED_FORM_TOLERANCE,
        format!("max lattice error over the scan {lattice_worst:.2e}"),
    ));
    o.checks.push(Check::new(
        "continuum",
        rows.windows(2).all(|w| w[1].continuum_gap < w[0].continuum_gap),
        format!(
            "interpolation gap {}",
            rows.iter().map(|r| format!("L={}: {:.3e}", r.l, r.continuum_gap)).collect::<Vec<_>>().join(", ")
        ),
    ));

    let mut nls = Vec::new();
    if a.skip_nls {
        o.notes.push("full NLS desk check skipped".into());
    } else {
        for eps in [0.4, 0.2, 0.1] {
            nls.push((eps, onedim_nls_pipeline(&envelope, 4, eps, Sign::Focusing, 0.5, 3.0, 64, 1e-3)?));
        }
        o.checks.push(Check::new(
            "nls trend",
            nls.windows(2).all(|w| w[1].1 < w[0].1),
            format!("L = 4, τ = 0.5: {}", nls.iter().map(|(e, v)| format!("ε={e}: {v:.3e}")).collect::<Vec<_>>().join(", ")),
        ));
    }
    o.results = json!({ "closed_form_error": single, "scan": rows, "nls": nls });
    o.table = table;
    Ok(o)
}
