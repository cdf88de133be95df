//! Direct enumerations used to audit the fast lattice code from the command
//! line.

use crlimit::lattice_resonance::{Idx, LatticeParams};

/// All `(K1, K2, K3)` with `K1 − K2 + K3 = K`, `K1`, `K3` in the ball and
/// `|K1|² − |K2|² + |K3|² = |K|²`, by scanning every pair, sorted.
pub fn brute_resonant(k: Idx, params: &LatticeParams) -> Vec<[Idx; 3]> {
    let ball = params.ball();
    let sq = |p: Idx| p[0] * p[0] + p[1] * p[1];
    let mut out = Vec::new();
    for &k1 in &ball {
        for &k3 in &ball {
            let k2 = [k1[0] + k3[0] - k[0], k1[1] + k3[1] - k[1]];
            if sq(k1) - sq(k2) + sq(k3) == sq(k) {
                out.push([k1, k2, k3]);
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_on_the_unit_lattice() {
        // Radius 1: the five points 0, ±e1, ±e2. With a vertex at the origin
        // the legs K1, K3 must be orthogonal: 9 degenerate choices (one leg
        // zero) plus 8 right angles between the axis neighbours.
        let params = LatticeParams::new(1, 1.0, 0.0).unwrap();
        assert_eq!(brute_resonant([0, 0], &params).len(), 9 + 8);
    }
}
