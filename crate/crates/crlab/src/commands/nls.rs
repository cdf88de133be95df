//! `nls compare`, `nls rescale`, `nls phase-probe`, `nls mass`.

use anyhow::Result;
use crlimit::cr_operator::{gaussian, random_field, GridField};
use crlimit::lattice_resonance::{LatticeField, LatticeParams};
use crlimit::nls_bridge::{
    approx_experiment, phase_shift_probe, unit_torus_rescale, weighted_l2_norms, ApproxReport, ApproxRun, Legs, NlsConfig, NlsSolver,
    PhaseMethod, Sign,
};
use num_complex::Complex64 as C64;
use serde_json::json;

use super::{load_config, outcome, ConfigError};
use crate::cli::{CompareArgs, MassArgs, PhaseProbeArgs, RescaleArgs};
use crate::report::{num, Check, Outcome, Table};

/// Relative error allowed for the fitted nonlinear phase rate.
pub const PHASE_TOLERANCE: f64 = 0.1;
/// Relative mass drift allowed for the split-step scheme.
pub const MASS_TOLERANCE: f64 = 1e-10;
/// How far the torus `H^s` norm may stray from the homogeneous weighted norm
/// of the profile.
pub const HS_MATCH: f64 = 0.2;

fn gaussian_datum(box_half: f64) -> Result<GridField> {
    Ok(GridField::from_closure(box_half, 32, |p| C64::new(gaussian(p), 0.0))?)
}

fn sign_of(focusing: bool) -> Sign {
    if focusing {
        Sign::Focusing
    } else {
        Sign::Defocusing
    }
}

fn last(v: &Option<Vec<f64>>) -> Option<f64> {
    v.as_ref().and_then(|v| v.last().copied())
}

/// NLS, resonant system and continuous equation compared across `L`.
pub fn compare(a: &CompareArgs) -> Result<Outcome> {
    let a = match &a.config {
        Some(path) => load_config::<CompareArgs>(path)?,
        None => a.clone(),
    };
    if a.l_list.is_empty() {
        return Err(ConfigError("--l-list is empty".into()).into());
    }
    let mut o = outcome("nls-compare", &a)?;
    let mut run = ApproxRun::new(gaussian_datum(a.cutoff.max(6.0) + 2.0)?, a.horizon);
    run.samples = a.samples;
    run.cutoff = a.cutoff;
    run.rs_dt = a.rs_dt;
    run.max_nls_steps = a.max_nls_steps;
    run.legs = Legs { full: true, resonant: true };
    let mut reports: Vec<ApproxReport> = Vec::new();
    for &l in &a.l_list {
        let cfg = NlsConfig { l, eps: a.eps, sign: sign_of(a.focusing), modes: a.modes, dt: a.dt, padded: false };
        reports.push(approx_experiment(&run, &cfg)?);
    }
    let mut table = Table::new(&["L", "tau", "t", "err_free", "err_resonant", "err_full", "full_vs_resonant"]);
    let opt = |v: &Option<Vec<f64>>, i: usize| v.as_ref().map(|v| num(v[i])).unwrap_or_default();
    for r in &reports {
        for i in 0..r.tau.len() {
            table.push(vec![
                r.l.to_string(),
                num(r.tau[i]),
                num(r.t[i]),
                num(r.err_free[i]),
                opt(&r.err_resonant, i),
                opt(&r.err_full, i),
                opt(&r.full_vs_resonant, i),
            ]);
        }
        for note in &r.notes {
            o.notes.push(format!("L = {}: {note}", r.l));
        }
        o.notes.push(format!("L = {}: weighted trace just beyond the cutoff = {:.2e}", r.l, r.trace_tail));
    }
    let full: Option<Vec<f64>> = reports.iter().map(|r| last(&r.err_full)).collect();
    let resonant: Option<Vec<f64>> = reports.iter().map(|r| last(&r.err_resonant)).collect();
    let fmt = |v: &[f64]| {
        reports.iter().zip(v).map(|(r, e)| format!("L={}: {e:.3e}", r.l)).collect::<Vec<_>>().join(", ")
    };
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    match &full {
        Some(v) => o.checks.push(Check::new("full trend", decreasing(v), format!("NLS error at τ = {}: {}", a.horizon, fmt(v)))),
        None => o.checks.push(Check::new(
            "full trend",
            false,
            format!("the NLS leg does not fit the step budget ({} steps needed at L = {})", reports[0].nls_steps, reports[0].l),
        )),
    }
    if let Some(v) = &resonant {
        o.checks.push(Check::new("resonant trend", decreasing(v), format!("resonant-system error at τ = {}: {}", a.horizon, fmt(v))));
    }
    o.results = serde_json::to_value(&reports)?;
    o.table = table;
    Ok(o)
}

/// Unit-torus normalisation of the Gaussian box experiment.
pub fn rescale(a: &RescaleArgs) -> Result<Outcome> {
    let mut o = outcome("nls-rescale", a)?;
    let g = gaussian_datum(a.cutoff + 2.0)?;
    let setup = unit_torus_rescale(&g, a.n, a.s, Sign::Defocusing, a.cutoff, 1e-3)?;
    let (inhomogeneous, homogeneous) = weighted_l2_norms(&g, a.s);
    let ratio = setup.hs_norm / homogeneous;
    o.checks.push(Check::new(
        "H^s scale",
        (ratio - 1.0).abs() < HS_MATCH,
        format!("‖v₀‖_Hs = {:.6}, ‖|ξ|^s g₀‖ = {homogeneous:.6}, ‖⟨ξ⟩^s g₀‖ = {inhomogeneous:.6}", setup.hs_norm),
    ));
    let mut table = Table::new(&["N", "s", "T_N", "hs_norm", "homogeneous", "inhomogeneous", "modes"]);
    table.push(vec![a.n.to_string(), num(a.s), num(setup.t_n), num(setup.hs_norm), num(homogeneous), num(inhomogeneous), setup.cfg.modes.to_string()]);
    o.results = json!({
        "t_n": setup.t_n,
        "hs_norm": setup.hs_norm,
        "homogeneous": homogeneous,
        "inhomogeneous": inhomogeneous,
        "modes": setup.cfg.modes,
        "box_equivalent_eps": (a.n as f64).powf(-a.s),
    });
    o.table = table;
    Ok(o)
}

/// Fit of the nonlinear phase rate of Gaussian data on the unit torus.
pub fn phase_probe(a: &PhaseProbeArgs) -> Result<Outcome> {
    if !(a.dtau > 0.0) {
        return Err(ConfigError("--dtau must be positive".into()).into());
    }
    let mut o = outcome("nls-phase-probe", a)?;
    let r = phase_shift_probe(a.n, a.s, &a.taus, Sign::Defocusing, a.cutoff, PhaseMethod::Resonant { dtau: a.dtau }, !a.free)?;
    let mut table = Table::new(&["t", "phase"]);
    for (t, p) in r.t.iter().zip(&r.phase) {
        table.push(vec![num(*t), num(*p)]);
    }
    if a.free {
        let scale = r.predicted.abs();
        o.checks.push(Check::new(
            "free rate",
            r.fitted.abs() < PHASE_TOLERANCE * scale,
            format!("fitted {:.4e} with the cubic term off (|·| < {PHASE_TOLERANCE}·{scale:.4e})", r.fitted),
        ));
    } else {
        o.checks.push(Check::new(
            "rate",
            r.relative_error < PHASE_TOLERANCE,
            format!("fitted {:.4e}, predicted (π/2)/T_N = {:.4e}, ratio {:.4}", r.fitted, r.predicted, r.fitted / r.predicted),
        ));
    }
    o.results = serde_json::to_value(&r)?;
    o.table = table;
    Ok(o)
}

/// Mass drift of the split-step scheme on a random datum.
pub fn mass(a: &MassArgs) -> Result<Outcome> {
    if a.steps == 0 {
        return Err(ConfigError("--steps must be positive".into()).into());
    }
    let mut o = outcome("nls-mass", a)?;
    let cfg = NlsConfig { l: 4, eps: 0.5, sign: Sign::Focusing, modes: 32, dt: a.dt, padded: false };
    let solver = NlsSolver::new(cfg)?;
    let f = random_field(a.seed, 6.0, 32)?;
    let a0 = LatticeField::from_fn(LatticeParams::new(cfg.l, 3.0, 3.0)?, |p| f.eval(p));
    let mut state = solver.to_spectral(&a0)?;
    let m0 = solver.mass(&state);
    let every = (a.steps / 10).max(1);
    let mut table = Table::new(&["step", "mass", "relative_drift"]);
    let mut worst: f64 = 0.0;
    table.push(vec!["0".into(), num(m0), num(0.0)]);
    for k in 1..=a.steps {
        solver.step(&mut state, a.dt);
        if k % every == 0 || k == a.steps {
            let m = solver.mass(&state);
            let drift = (m - m0).abs() / m0;
            worst = worst.max(drift);
            table.push(vec![k.to_string(), num(m), num(drift)]);
        }
    }
    o.checks.push(Check::new(
        "mass",
        worst < MASS_TOLERANCE,
        format!("max relative mass drift over {} steps = {worst:.2e} (< {MASS_TOLERANCE:e})", a.steps),
    ));
    o.results = json!({ "initial_mass": m0, "max_relative_drift": worst });
    o.table = table;
    Ok(o)
}
