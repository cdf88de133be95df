//! Small numerical building blocks: quadrature rules, Hermite functions and
//! a square two-dimensional FFT.

use std::sync::Arc;

use gauss_quad::GaussLegendre;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

/// Gauss–Legendre nodes and weights mapped to `[a, b]`, sorted by node.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let rule = GaussLegendre::new(n.try_into().expect("n >= 1"));
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut pairs: Vec<(f64, f64)> = rule
        .iter()
        .map(|(x, w)| (mid + half * *x, half * *w))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    pairs.into_iter().unzip()
}

/// Values `h_0(x), …, h_{n-1}(x)` of the L²-normalised Hermite functions
/// `h_k(x) = (2^k k! √π)^{-1/2} H_k(x) e^{-x²/2}`.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n];
    fill_hermite_functions(x, &mut out);
    out
}

/// In-place variant of [`hermite_functions`] using the stable three-term
/// recurrence `h_{k+1} = √(2/(k+1)) x h_k − √(k/(k+1)) h_{k-1}`.
pub fn fill_hermite_functions(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for k in 1..out.len().saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

/// Gauss–Hermite rule for the weight `e^{-y²}` expressed for integrands that
/// already carry their Gaussian factor: returns nodes `y_i` and weights `W_i`
/// with `∫ p(y) e^{-y²} dy = Σ W_i p(y_i) e^{-y_i²}` exactly for polynomials of
/// degree `< 2q`.
///
/// Nodes come from the Golub–Welsch eigenproblem, polished by Newton steps on
/// `h_q`; the weights use the Christoffel form `W_i = 1 / Σ_{k<q} h_k(y_i)²`,
/// which never forms the tiny raw weights.
pub fn gauss_hermite_function_rule(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1);
    let mut jac = DMatrix::<f64>::zeros(q, q);
    for k in 1..q {
        let off = (k as f64 / 2.0).sqrt();
        jac[(k, k - 1)] = off;
        jac[(k - 1, k)] = off;
    }
    let eig = SymmetricEigen::new(jac);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    let mut buf = vec![0.0; q + 1];
    for y in nodes.iter_mut() {
        for _ in 0..3 {
            fill_hermite_functions(*y, &mut buf);
            // h_q' = √(2q) h_{q-1} − y h_q
            let d = (2.0 * q as f64).sqrt() * buf[q - 1] - *y * buf[q];
            if d != 0.0 {
                *y -= buf[q] / d;
            }
        }
    }
    let weights = nodes
        .iter()
        .map(|&y| {
            fill_hermite_functions(y, &mut buf[..q]);
            1.0 / buf[..q].iter().map(|v| v * v).sum::<f64>()
        })
        .collect();
    (nodes, weights)
}

/// Forward/inverse unnormalised FFT on a row-major `n × n` complex array.
#[derive(Clone)]
pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("n", &self.n).finish()
    }
}

impl Fft2 {
    /// Plans transforms of side `n`.
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// Side length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `X_k = Σ_j x_j e^{-2πi j·k/n}` in place.
    pub fn forward(&self, data: &mut [C64]) {
        self.apply(data, &self.forward);
    }

    /// `x_j = Σ_k X_k e^{+2πi j·k/n}` in place (no `1/n²` factor).
    pub fn inverse(&self, data: &mut [C64]) {
        self.apply(data, &self.inverse);
    }

    fn apply(&self, data: &mut [C64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n, "FFT buffer has the wrong size");
        plan.process(data);
        transpose(data, n);
        plan.process(data);
        transpose(data, n);
    }
}

fn transpose(data: &mut [C64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Signed frequency index of FFT bin `j` on a grid of `n` points.
pub fn fft_freq(j: usize, n: usize) -> i64 {
    if j < n.div_ceil(2) {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(6, 0.0, 2.0);
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(11)).sum();
        assert!((v - 2f64.powi(12) / 12.0).abs() < 1e-10);
    }

    #[test]
    fn hermite_functions_are_orthonormal_under_the_rule() {
        let q = 40;
        let (y, w) = gauss_hermite_function_rule(q);
        let vals: Vec<Vec<f64>> = y.iter().map(|&t| hermite_functions(q, t)).collect();
        for a in 0..q {
            for b in 0..q {
                let s: f64 = (0..q).map(|i| w[i] * vals[i][a] * vals[i][b]).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-12, "({a},{b}) -> {s}");
            }
        }
    }

    #[test]
    fn fft_round_trip() {
        let n = 8;
        let f = Fft2::new(n);
        let orig: Vec<C64> = (0..n * n).map(|i| C64::new(i as f64, (i * i % 7) as f64)).collect();
        let mut d = orig.clone();
        f.forward(&mut d);
        f.inverse(&mut d);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a / (n * n) as f64 - b).norm() < 1e-12);
        }
    }

    #[test]
    fn fft_freq_wraps() {
        assert_eq!(fft_freq(0, 8), 0);
        assert_eq!(fft_freq(3, 8), 3);
        assert_eq!(fft_freq(4, 8), -4);
        assert_eq!(fft_freq(7, 8), -1);
    }
}
