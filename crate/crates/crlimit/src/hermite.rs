//! Harmonic-oscillator (Hermite-function) representation of fields on R².
//!
//! The basis functions are `φ_{n,m}(x) = s^{-1} h_n(x₁/s) h_m(x₂/s)` with
//! normalised Hermite functions `h_n` and a length scale `s`. A truncation
//! keeps the levels `ℓ = n + m < M`; coefficients are stored level by level,
//! and inside level `ℓ` in the order `(ℓ,0), (ℓ−1,1), …, (0,ℓ)`.
//!
//! In this basis the trilinear operator has the lens representation
//! `T(f,g,h) = 2π ∫_0^{π/2} U_θ* (U_θf · conj(U_θg) · U_θh) dθ` with
//! `U_θ = e^{-iθ(−Δ+|x|²)}`, which acts on level `ℓ` by the phase `e^{-2iθℓ}`
//! (the ground-state energy cancels between the four factors). Both the θ
//! integral (uniform rule with `M` nodes) and the spatial integral (Gauss rule
//! with `2M` nodes per axis for the weight `e^{-2x²}`) are exact on the
//! truncated space, so [`HermiteEngine::apply`] is the exact Galerkin
//! restriction of the operator up to rounding. The operator commutes with
//! `L²`-dilations, so the scale only enters projection and reconstruction.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{fill_hermite_functions, gauss_hermite_function_rule};

/// Index of `(n, m)` in the level-ordered coefficient vector.
#[inline]
pub fn index_of(n: usize, m: usize) -> usize {
    let l = n + m;
    l * (l + 1) / 2 + m
}

/// `(n, m)` at position `idx` of the level-ordered coefficient vector.
pub fn pair_of(idx: usize) -> (usize, usize) {
    let mut l = 0;
    while (l + 1) * (l + 2) / 2 <= idx {
        l += 1;
    }
    let m = idx - l * (l + 1) / 2;
    (l - m, m)
}

/// Number of coefficients of the levels `ℓ < levels`.
#[inline]
pub fn dimension(levels: usize) -> usize {
    levels * (levels + 1) / 2
}

/// Range of coefficient positions occupied by level `ℓ`.
pub fn level_range(l: usize) -> std::ops::Range<usize> {
    l * (l + 1) / 2..(l + 1) * (l + 2) / 2
}

/// Exact Galerkin evaluator of the trilinear operator on a truncated basis.
#[derive(Clone, Debug)]
pub struct HermiteEngine {
    levels: usize,
    /// Spatial nodes `x_i` (one axis).
    nodes: Vec<f64>,
    /// Quadrature weights for the `x`-integral of four basis functions.
    weights: Vec<f64>,
    /// `hv[i * levels + k] = h_k(x_i)`.
    hv: Vec<f64>,
}

impl HermiteEngine {
    /// Engine for the levels `ℓ < levels`.
    pub fn new(levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidParameter("need at least one Hermite level".into()));
        }
        let q = 2 * levels;
        let (y, w) = gauss_hermite_function_rule(q);
        let nodes: Vec<f64> = y.iter().map(|y| y / 2f64.sqrt()).collect();
        let weights: Vec<f64> = w.iter().map(|w| w / 2f64.sqrt()).collect();
        let mut hv = vec![0.0; q * levels];
        for (i, &x) in nodes.iter().enumerate() {
            fill_hermite_functions(x, &mut hv[i * levels..(i + 1) * levels]);
        }
        Ok(HermiteEngine { levels, nodes, weights, hv })
    }

    /// Number of levels `M`.
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Coefficient-vector length.
    pub fn dim(&self) -> usize {
        dimension(self.levels)
    }

    /// Values of `U_θ f` on the tensor node grid, row-major in `(x₁, x₂)`.
    fn propagate(&self, c: &[C64], phases: &[C64]) -> Vec<C64> {
        let (m_lv, q) = (self.levels, self.nodes.len());
        // b[m * q + i] = Σ_n c_{n,m} e^{-2iθ(n+m)} h_n(x_i)
        let mut b = vec![C64::new(0.0, 0.0); m_lv * q];
        for m in 0..m_lv {
            for i in 0..q {
                let h = &self.hv[i * m_lv..];
                let mut acc = C64::new(0.0, 0.0);
                for n in 0..m_lv - m {
                    acc += c[index_of(n, m)] * phases[n + m] * h[n];
                }
                b[m * q + i] = acc;
            }
        }
        let mut out = vec![C64::new(0.0, 0.0); q * q];
        for i in 0..q {
            for k in 0..q {
                let h = &self.hv[k * m_lv..];
                let mut acc = C64::new(0.0, 0.0);
                for m in 0..m_lv {
                    acc += b[m * q + i] * h[m];
                }
                out[i * q + k] = acc;
            }
        }
        out
    }

    /// `Σ_{i,k} p(x_i, x_k) h_n(x_i) h_m(x_k)` for all `(n, m)`, accumulated
    /// into `out` with the factor `scale · e^{+2iθℓ}`.
    fn project_into(&self, p: &[C64], phases: &[C64], scale: f64, out: &mut [C64]) {
        let (m_lv, q) = (self.levels, self.nodes.len());
        // a[i * m_lv + m] = Σ_k p(x_i, x_k) h_m(x_k)
        let mut a = vec![C64::new(0.0, 0.0); q * m_lv];
        for i in 0..q {
            for k in 0..q {
                let v = p[i * q + k];
                let h = &self.hv[k * m_lv..(k + 1) * m_lv];
                for m in 0..m_lv {
                    a[i * m_lv + m] += v * h[m];
                }
            }
        }
        for m in 0..m_lv {
            for n in 0..m_lv - m {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..q {
                    acc += a[i * m_lv + m] * self.hv[i * m_lv + n];
                }
                out[index_of(n, m)] += acc * phases[n + m].conj() * scale;
            }
        }
    }

    /// Galerkin restriction of `T(f, g, h)` to the truncated space.
    pub fn apply(&self, f: &[C64], g: &[C64], h: &[C64]) -> Vec<C64> {
        let d = self.dim();
        assert!(f.len() == d && g.len() == d && h.len() == d, "coefficient length mismatch");
        let same = std::ptr::eq(f, g) && std::ptr::eq(g, h);
        let nt = self.levels;
        let dtheta = PI / (2.0 * nt as f64);
        let q = self.nodes.len();
        (0..nt)
            .into_par_iter()
            .map(|j| {
                let theta = j as f64 * dtheta;
                let phases: Vec<C64> =
                    (0..self.levels).map(|l| C64::from_polar(1.0, -2.0 * theta * l as f64)).collect();
                let uf = self.propagate(f, &phases);
                let mut prod = if same {
                    uf.iter().map(|v| v * v.norm_sqr()).collect::<Vec<_>>()
                } else {
                    let ug = self.propagate(g, &phases);
                    let uh = self.propagate(h, &phases);
                    (0..q * q).map(|i| uf[i] * ug[i].conj() * uh[i]).collect()
                };
                for i in 0..q {
                    for k in 0..q {
                        prod[i * q + k] *= self.weights[i] * self.weights[k];
                    }
                }
                let mut out = vec![C64::new(0.0, 0.0); d];
                self.project_into(&prod, &phases, 2.0 * PI * dtheta, &mut out);
                out
            })
            .reduce(
                || vec![C64::new(0.0, 0.0); d],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    }

    /// `T(c, c, c)` on the truncated space.
    pub fn cubic(&self, c: &[C64]) -> Vec<C64> {
        self.apply(c, c, c)
    }

    /// `H(c) = ¼ Re⟨T(c,c,c), c⟩`.
    pub fn hamiltonian(&self, c: &[C64]) -> f64 {
        0.25 * inner(c, &self.cubic(c)).re
    }
}

/// `Σ conj(a_i) b_i`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `Σ |c_i|²`.
pub fn mass(c: &[C64]) -> f64 {
    c.iter().map(|v| v.norm_sqr()).sum()
}

/// Mass carried by each level.
pub fn level_masses(c: &[C64], levels: usize) -> Vec<f64> {
    (0..levels).map(|l| c[level_range(l)].iter().map(|v| v.norm_sqr()).sum()).collect()
}

/// Evaluates `Σ c_{n,m} φ_{n,m}(x)` at a point (basis scale `scale`).
pub fn evaluate(c: &[C64], levels: usize, scale: f64, x: [f64; 2]) -> C64 {
    let mut h1 = vec![0.0; levels];
    let mut h2 = vec![0.0; levels];
    fill_hermite_functions(x[0] / scale, &mut h1);
    fill_hermite_functions(x[1] / scale, &mut h2);
    let mut acc = C64::new(0.0, 0.0);
    for m in 0..levels {
        let mut row = C64::new(0.0, 0.0);
        for n in 0..levels - m {
            row += c[index_of(n, m)] * h1[n];
        }
        acc += row * h2[m];
    }
    acc / scale
}

/// Orthogonal projection of a function onto the levels `ℓ < levels` of the
/// scale-`scale` basis, using a Gauss rule with `rule_nodes` nodes per axis.
pub fn project_fn(f: &(dyn Fn([f64; 2]) -> C64 + Sync), levels: usize, scale: f64, rule_nodes: usize) -> Vec<C64> {
    let (y, w) = gauss_hermite_function_rule(rule_nodes);
    let q = y.len();
    let mut hv = vec![0.0; q * levels];
    for (i, &yi) in y.iter().enumerate() {
        fill_hermite_functions(yi, &mut hv[i * levels..(i + 1) * levels]);
    }
    // samples[i * q + k] = w_i w_k s f(s y_i, s y_k)
    let samples: Vec<C64> = (0..q * q)
        .into_par_iter()
        .map(|ik| {
            let (i, k) = (ik / q, ik % q);
            f([scale * y[i], scale * y[k]]) * (w[i] * w[k] * scale)
        })
        .collect();
    let mut a = vec![C64::new(0.0, 0.0); q * levels];
    for i in 0..q {
        for k in 0..q {
            let v = samples[i * q + k];
            for m in 0..levels {
                a[i * levels + m] += v * hv[k * levels + m];
            }
        }
    }
    let mut out = vec![C64::new(0.0, 0.0); dimension(levels)];
    for m in 0..levels {
        for n in 0..levels - m {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..q {
                acc += a[i * levels + m] * hv[i * levels + n];
            }
            out[index_of(n, m)] = acc;
        }
    }
    out
}

/// Coefficients spread into a square `(n, m)` array of side `side ≥ levels`.
fn to_square(c: &[C64], levels: usize, side: usize) -> Vec<C64> {
    let mut sq = vec![C64::new(0.0, 0.0); side * side];
    for m in 0..levels {
        for n in 0..levels - m {
            sq[n * side + m] = c[index_of(n, m)];
        }
    }
    sq
}

/// Ladder action of `x_axis` (`deriv = false`) or `∂_axis` (`deriv = true`)
/// on a square coefficient array, for unit scale.
fn ladder(sq: &[C64], side: usize, axis: usize, deriv: bool) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); side * side];
    let get = |n: isize, m: isize| -> C64 {
        if n < 0 || m < 0 || n as usize >= side || m as usize >= side {
            C64::new(0.0, 0.0)
        } else {
            sq[n as usize * side + m as usize]
        }
    };
    for n in 0..side as isize {
        for m in 0..side as isize {
            let (k, below, above) = if axis == 0 {
                (n as f64, get(n - 1, m), get(n + 1, m))
            } else {
                (m as f64, get(n, m - 1), get(n, m + 1))
            };
            // x h_k = √((k+1)/2) h_{k+1} + √(k/2) h_{k−1};
            // h_k' = √(k/2) h_{k−1} − √((k+1)/2) h_{k+1}.
            let up = (k / 2.0).sqrt() * below;
            let down = ((k + 1.0) / 2.0).sqrt() * above;
            out[n as usize * side + m as usize] = if deriv { down - up } else { up + down };
        }
    }
    out
}

/// Quadratic conserved functionals of a field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    /// `∫|f|²`.
    pub mass: f64,
    /// `∫ξ|f̂|² = ⟨f, −i∇f⟩`.
    pub momentum: [f64; 2],
    /// `∫x|f|²`.
    pub position: [f64; 2],
    /// `∫|x|²|f|²`.
    pub first_moment: f64,
    /// `∫|∇f|²`.
    pub kinetic: f64,
    /// `i∫(x × ∇f) conj f`.
    pub angular: f64,
}

/// The quadratic conserved functionals of a truncated Hermite expansion,
/// evaluated exactly through ladder operators.
pub fn moments(c: &[C64], levels: usize, scale: f64) -> Moments {
    let side = levels + 2;
    let sq = to_square(c, levels, side);
    let x1 = ladder(&sq, side, 0, false);
    let x2 = ladder(&sq, side, 1, false);
    let d1 = ladder(&sq, side, 0, true);
    let d2 = ladder(&sq, side, 1, true);
    let i = C64::new(0.0, 1.0);
    let x1d2 = ladder(&d2, side, 0, false);
    let x2d1 = ladder(&d1, side, 1, false);
    let rot: Vec<C64> = x1d2.iter().zip(&x2d1).map(|(a, b)| a - b).collect();
    Moments {
        mass: mass(&sq),
        momentum: [(-i * inner(&sq, &d1)).re / scale, (-i * inner(&sq, &d2)).re / scale],
        position: [inner(&sq, &x1).re * scale, inner(&sq, &x2).re * scale],
        first_moment: (mass(&x1) + mass(&x2)) * scale * scale,
        kinetic: (mass(&d1) + mass(&d2)) / (scale * scale),
        angular: (i * inner(&sq, &rot)).re,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss() -> impl Fn([f64; 2]) -> C64 + Sync {
        |x: [f64; 2]| C64::new((-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp() / PI.sqrt(), 0.0)
    }

    #[test]
    fn index_round_trip() {
        for idx in 0..dimension(12) {
            let (n, m) = pair_of(idx);
            assert_eq!(index_of(n, m), idx);
        }
        assert_eq!(pair_of(1), (1, 0));
        assert_eq!(pair_of(2), (0, 1));
    }

    #[test]
    fn gaussian_is_the_ground_state() {
        let c = project_fn(&gauss(), 6, 1.0, 24);
        assert!((c[0].re - 1.0).abs() < 1e-13);
        assert!(c[1..].iter().all(|v| v.norm() < 1e-13));
    }

    #[test]
    fn ground_state_rotates_at_half_pi() {
        let eng = HermiteEngine::new(8).unwrap();
        let mut c = vec![C64::new(0.0, 0.0); eng.dim()];
        c[0] = C64::new(1.0, 0.0);
        let t = eng.cubic(&c);
        assert!((t[0].re - PI / 2.0).abs() < 1e-13, "{}", t[0]);
        assert!(t[1..].iter().all(|v| v.norm() < 1e-13));
        assert!((eng.hamiltonian(&c) - PI / 8.0).abs() < 1e-13);
    }

    #[test]
    fn projection_reconstructs_band_limited_functions() {
        let levels = 7;
        let c: Vec<C64> = (0..dimension(levels)).map(|i| C64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let f = |x: [f64; 2]| evaluate(&c, levels, 1.3, x);
        let back = project_fn(&f, levels, 1.3, 20);
        for (a, b) in c.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn gaussian_moments() {
        let mut c = vec![C64::new(0.0, 0.0); dimension(4)];
        c[0] = C64::new(1.0, 0.0);
        let mo = moments(&c, 4, 1.0);
        assert!((mo.mass - 1.0).abs() < 1e-15);
        assert!(mo.momentum.iter().chain(mo.position.iter()).all(|v| v.abs() < 1e-15));
        assert!((mo.first_moment - 1.0).abs() < 1e-14);
        assert!((mo.kinetic - 1.0).abs() < 1e-14);
        assert!(mo.angular.abs() < 1e-15);
    }
}
