//! `lattice density`, `lattice resonant-count`, `lattice strichartz-scan`.

use std::f64::consts::PI;
use std::time::Instant;

use anyhow::Result;
use crlimit::lattice_resonance::{enumerate_resonant, strichartz_sum, visible_density, LatticeField, LatticeParams, ZETA2};
use num_complex::Complex64 as C64;
use serde_json::json;

use super::{outcome, ConfigError};
use crate::cli::{DensityArgs, ResonantCountArgs, StrichartzArgs};
use crate::oracle::brute_resonant;
use crate::report::{num, Check, Outcome, Table};

/// Largest allowed deviation of the density from `6/π²` at `N = n_max`.
pub const DENSITY_TOLERANCE: f64 = 5e-3;

/// Bound on `|ζ(2)·density − 1|·N/(1 + log N)`; the measured maximum over
/// `N ≤ 2000` is about 0.64 (at `N = 1`).
pub const DISCREPANCY_BOUND: f64 = 1.0;

/// Allowed ratio between the largest and smallest normalised Strichartz sums.
pub const STRICHARTZ_BAND: f64 = 2.0;

/// Scan of the visible-point density.
pub fn density(a: &DensityArgs) -> Result<Outcome> {
    if a.n_max == 0 {
        return Err(ConfigError("--n-max must be at least 1".into()).into());
    }
    let mut o = outcome("lattice-density", a)?;
    let mut ns: Vec<u64> = [1u64, 2, 5].iter().flat_map(|&m| (0..7).map(move |e| m * 10u64.pow(e))).filter(|&n| n < a.n_max).collect();
    ns.sort_unstable();
    ns.push(a.n_max);
    let mut table = Table::new(&["N", "density", "zeta2_density_minus_1", "scaled_error"]);
    let mut worst: f64 = 0.0;
    let mut last = 0.0;
    for &n in &ns {
        let d = visible_density(n)?;
        let err = ZETA2 * d - 1.0;
        let scaled = err.abs() * n as f64 / (1.0 + (n as f64).ln());
        worst = worst.max(scaled);
        last = d;
        table.push(vec![n.to_string(), num(d), num(err), num(scaled)]);
    }
    let dev = (last - 6.0 / (PI * PI)).abs();
    o.checks.push(Check::new("density", dev < DENSITY_TOLERANCE, format!("|density − 6/π²| = {dev:.2e} at N = {} (< {DENSITY_TOLERANCE:e})", a.n_max)));
    o.checks.push(Check::new(
        "discrepancy",
        worst <= DISCREPANCY_BOUND,
        format!("max |ζ(2)d − 1|·N/(1+log N) = {worst:.3} (≤ {DISCREPANCY_BOUND})"),
    ));
    o.results = json!({ "density": last, "deviation": dev, "max_scaled_error": worst });
    o.table = table;
    Ok(o)
}

/// Fast enumeration against the direct scan, as multisets.
pub fn resonant_count(a: &ResonantCountArgs) -> Result<Outcome> {
    if a.l_list.is_empty() {
        return Err(ConfigError("--l-list is empty".into()).into());
    }
    let mut o = outcome("lattice-resonant-count", a)?;
    let mut table = Table::new(&["L", "points", "tuples", "mismatched_points"]);
    let mut timings = Vec::new();
    let mut total_bad = 0;
    for &l in &a.l_list {
        let params = LatticeParams::new(l, a.cutoff, 0.0)?;
        let start = Instant::now();
        let (mut tuples, mut bad) = (0usize, 0usize);
        let ball = params.ball();
        for &k in &ball {
            let mut fast: Vec<_> = enumerate_resonant(k, &params, true)?.into_iter().map(|t| [t.k1, t.k2, t.k3]).collect();
            fast.sort();
            tuples += fast.len();
            if fast != brute_resonant(k, &params) {
                bad += 1;
            }
        }
        total_bad += bad;
        timings.push(json!({ "l": l, "seconds": start.elapsed().as_secs_f64() }));
        table.push(vec![l.to_string(), ball.len().to_string(), tuples.to_string(), bad.to_string()]);
    }
    o.checks.push(Check::new(
        "multisets",
        total_bad == 0,
        format!("{total_bad} points where enumeration and brute force differ (L ∈ {:?}, cutoff {})", a.l_list, a.cutoff),
    ));
    o.results = json!({ "mismatched_points": total_bad, "timings": timings });
    o.table = table;
    Ok(o)
}

/// `strichartz_sum` of the indicator of `|k| ≤ N`, normalised by
/// `N² log N · ‖φ̂‖∞³ ‖φ̂‖₁`.
pub fn strichartz_scan(a: &StrichartzArgs) -> Result<Outcome> {
    if a.n_list.iter().any(|&n| n < 2) || a.n_list.len() < 2 {
        return Err(ConfigError("--n-list needs at least two values, each ≥ 2".into()).into());
    }
    let mut o = outcome("lattice-strichartz-scan", a)?;
    let mut table = Table::new(&["N", "support", "sum", "sum_over_n2logn", "normalised"]);
    let mut normalised = Vec::new();
    for &n in &a.n_list {
        let params = LatticeParams::new(1, 2.0 * n as f64, 0.0)?;
        let r2 = (n * n) as i64;
        let phi = LatticeField::from_index_fn(params, |k| if k[0] * k[0] + k[1] * k[1] <= r2 { C64::new(1.0, 0.0) } else { C64::default() });
        let support = phi.raw().iter().filter(|v| v.norm() > 0.0).count() as f64;
        let s = strichartz_sum(&phi, n)?;
        let nf = n as f64;
        let base = nf * nf * nf.ln();
        let v = s / (base * support);
        normalised.push(v);
        table.push(vec![n.to_string(), support.to_string(), num(s), num(s / base), num(v)]);
    }
    let hi = normalised.iter().cloned().fold(f64::MIN, f64::max);
    let lo = normalised.iter().cloned().fold(f64::MAX, f64::min);
    o.checks.push(Check::new(
        "scaling",
        hi / lo <= STRICHARTZ_BAND,
        format!("sum/(N² log N·‖φ̂‖∞³‖φ̂‖₁) ∈ [{lo:.4}, {hi:.4}], ratio {:.3} (≤ {STRICHARTZ_BAND})", hi / lo),
    ));
    o.results = json!({ "normalised": normalised, "ratio": hi / lo });
    o.table = table;
    Ok(o)
}
