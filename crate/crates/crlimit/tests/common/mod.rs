//! Brute-force oracles shared by the integration tests. They are slow on
//! purpose: every value is computed straight from its definition.

#![allow(dead_code)]

use crlimit::lattice_resonance::{Idx, LatticeField, LatticeParams};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(K1, K2, K3)` with `K1 − K2 + K3 = K`, `K1`, `K3` in the ball and
/// `|K1|² − |K2|² + |K3|² − |K|² = 2m/L²`, by scanning every pair.
pub fn brute_level_set(k: Idx, m: i64, params: &LatticeParams) -> Vec<[Idx; 3]> {
    let ball = params.ball();
    let sq = |p: Idx| p[0] * p[0] + p[1] * p[1];
    let mut out = Vec::new();
    for &k1 in &ball {
        for &k3 in &ball {
            let k2 = [k1[0] + k3[0] - k[0], k1[1] + k3[1] - k[1]];
            if sq(k1) - sq(k2) + sq(k3) - sq(k) == 2 * m {
                out.push([k1, k2, k3]);
            }
        }
    }
    out.sort();
    out
}

/// Fraction of nonzero points of `[−N, N]²` with coprime coordinates.
pub fn brute_visible_density(n: i64) -> f64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }
    let mut visible = 0u64;
    let mut total = 0u64;
    for p in -n..=n {
        for q in -n..=n {
            if (p, q) != (0, 0) {
                total += 1;
                if gcd(p, q) == 1 {
                    visible += 1;
                }
            }
        }
    }
    visible as f64 / total as f64
}

/// `ζ(2)/(2L² log L) Σ e_{K1} conj(f_{K2}) g_{K3}` over the brute-force
/// resonant set.
pub fn brute_t_l(e: &LatticeField, f: &LatticeField, g: &LatticeField, k: Idx) -> C64 {
    let params = e.params();
    let l = params.l as f64;
    let norm = std::f64::consts::PI.powi(2) / 6.0 / (2.0 * l * l * l.ln());
    brute_level_set(k, 0, params).into_iter().map(|[k1, k2, k3]| e.get(k1) * f.get(k2).conj() * g.get(k3)).sum::<C64>() * norm
}

/// A seeded field with independent complex Gaussian-ish entries damped by
/// `e^{−|K|²/4}`.
pub fn random_lattice_field(params: LatticeParams, seed: u64) -> LatticeField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = LatticeField::zeros(params);
    for k in params.ball() {
        let p = params.point(k);
        let w = (-(p[0] * p[0] + p[1] * p[1]) / 4.0).exp();
        f.set(k, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * w).unwrap();
    }
    f
}

/// `max_K |a_K − b_K|`.
pub fn sup_distance(a: &LatticeField, b: &LatticeField) -> f64 {
    a.params().ball().into_iter().map(|k| (a.get(k) - b.get(k)).norm()).fold(0.0, f64::max)
}
