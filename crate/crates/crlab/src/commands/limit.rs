//! `limit tl-vs-t`.

use anyhow::Result;
use crlimit::cr_operator::{gaussian, GridField, QuadratureSpec};
use crlimit::lattice_resonance::LatticeParams;
use crlimit::nls_bridge::{gap_probe_indices, tl_vs_t_gap, GapPoints};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde_json::json;

use super::{outcome, ConfigError};
use crate::cli::TlVsTArgs;
use crate::report::{num, Check, Outcome, Table};

/// Allowed ratio between the largest and smallest `gap·log L`, i.e. how far
/// the gap may stray from a `1/log L` law.
pub const LOG_RATE_BAND: f64 = 3.0;

/// Gap between the discrete and continuous operators on Gaussian data as the
/// box grows.
pub fn tl_vs_t(a: &TlVsTArgs) -> Result<Outcome> {
    if a.l_list.len() < 2 || a.l_list.iter().any(|&l| l < 2) {
        return Err(ConfigError("--l-list needs at least two sizes L ≥ 2".into()).into());
    }
    let mut o = outcome("limit-tl-vs-t", a)?;
    let g = GridField::from_closure(a.cutoff + 2.0, 32, |p| C64::new(gaussian(p), 0.0))?;
    let quad = QuadratureSpec::default();
    let gaps: Vec<(u32, f64)> = a
        .l_list
        .par_iter()
        .map(|&l| {
            let params = LatticeParams::new(l, a.cutoff, a.sigma)?;
            let points = GapPoints::Indices(gap_probe_indices(&params)?);
            Ok((l, tl_vs_t_gap(&g, &params, &quad, &points)?))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&["L", "gap", "gap_times_log_L"]);
    let scaled: Vec<f64> = gaps.iter().map(|&(l, gap)| gap * (l as f64).ln()).collect();
    for (&(l, gap), s) in gaps.iter().zip(&scaled) {
        table.push(vec![l.to_string(), num(gap), num(*s)]);
    }
    let decreasing = gaps.windows(2).all(|w| w[1].1 < w[0].1);
    o.checks.push(Check::new(
        "monotone",
        decreasing,
        format!("gaps {}", gaps.iter().map(|(l, g)| format!("L={l}: {g:.4e}")).collect::<Vec<_>>().join(", ")),
    ));
    let hi = scaled.iter().cloned().fold(f64::MIN, f64::max);
    let lo = scaled.iter().cloned().fold(f64::MAX, f64::min);
    o.checks.push(Check::new(
        "log rate",
        lo > 0.0 && hi / lo <= LOG_RATE_BAND,
        format!("gap·log L ∈ [{lo:.4}, {hi:.4}] (ratio ≤ {LOG_RATE_BAND})"),
    ));
    o.results = json!({ "gaps": gaps, "gap_times_log_l": scaled });
    o.table = table;
    Ok(o)
}
