//! The one-dimensional analogue, where the whole limit can be checked
//! against a closed form.
//!
//! On `T_L` with `u = L^{-1} Σ_K a_K e^{2πiKx}`, `K ∈ Z/L`, the equation
//! `−i∂ₜu + ∂²ₓu = μ ε²|u|²u` becomes, for `b_K(s) = a_K(L²s)e^{−4π²iL²K²s}`,
//! a sum over `K₁ − K₂ + K₃ = K` with phases `e^{4π²iL²Ωs}`. In one dimension
//! the resonant quadruples are exactly `K₂ ∈ {K₁, K₃}`, so the resonant
//! system is `−i∂ₛb_K = μ ε²(2S − |b_K|²) b_K` with the conserved mass
//! `S = Σ|b_J|²`. The gauge `c_K = b_K e^{−2iμε²Ss}` leaves
//! `−i∂ₛc_K = −μ ε²|c_K|²c_K`, solved by `c_K(s) = c_K(0)e^{−iμε²|c_K(0)|²s}`.
//! For the focusing sign `μ = −1` this is `g(τ, ξ) = g₀(ξ)e^{iτ|g₀(ξ)|²}` at
//! `τ = ε²s`; the defocusing sign runs the same closed form backwards in `τ`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nls_bridge::Sign;

/// Samples `ξ ↦ g(ξ)` on the uniform grid `ξ_i = −B + i·2B/n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Line1DField {
    box_half: f64,
    values: Vec<C64>,
    /// Decay exponent `σ > 1` of the weighted sup norm.
    pub sigma: f64,
}

impl Line1DField {
    /// Samples `f` on `n` nodes of `[−B, B)`.
    pub fn from_fn(box_half: f64, n: usize, sigma: f64, f: impl Fn(f64) -> C64) -> Result<Self> {
        if !(box_half > 0.0) || n < 2 {
            return Err(Error::InvalidParameter("line field needs B > 0 and n ≥ 2".into()));
        }
        if !(sigma > 1.0) {
            return Err(Error::InvalidParameter(format!("decay exponent must exceed 1, got {sigma}")));
        }
        let h = 2.0 * box_half / n as f64;
        Ok(Line1DField { box_half, values: (0..n).map(|i| f(-box_half + i as f64 * h)).collect(), sigma })
    }

    /// Half-width `B`.
    pub fn box_half(&self) -> f64 {
        self.box_half
    }

    /// Node values.
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Node `ξ_i`.
    pub fn coord(&self, i: usize) -> f64 {
        -self.box_half + i as f64 * 2.0 * self.box_half / self.values.len() as f64
    }

    /// `sup ⟨ξ⟩^σ |g(ξ)|` over the nodes.
    pub fn x_sigma_norm(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (1.0 + self.coord(i).powi(2)).powf(self.sigma / 2.0) * v.norm())
            .fold(0.0, f64::max)
    }
}

/// `g₀ e^{it|g₀|²}` for one value.
pub fn onedim_exact_value(g0: C64, t: f64) -> C64 {
    g0 * C64::from_polar(1.0, t * g0.norm_sqr())
}

/// The closed-form solution `g(t, ξ) = g₀(ξ)e^{it|g₀(ξ)|²}` of
/// `i∂ₜg = −|g|²g` (the focusing limit equation), node by node.
pub fn onedim_exact(g0: &Line1DField, t: f64) -> Line1DField {
    Line1DField {
        box_half: g0.box_half,
        values: g0.values.iter().map(|&v| onedim_exact_value(v, t)).collect(),
        sigma: g0.sigma,
    }
}

/// Sequence on `Z/L` truncated to `|K| ≤ cutoff`; index `k` stands for
/// `K = k/L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice1D {
    /// Box size.
    pub l: u32,
    /// Largest index kept.
    pub radius: i64,
    /// Values at `k = −radius..=radius`.
    pub values: Vec<C64>,
}

impl Lattice1D {
    /// Samples `f(K)` for `|K| ≤ cutoff`.
    pub fn from_fn(l: u32, cutoff: f64, f: impl Fn(f64) -> C64) -> Result<Self> {
        if l == 0 || !(cutoff > 0.0) {
            return Err(Error::InvalidParameter("1D lattice needs L ≥ 1 and a positive cutoff".into()));
        }
        let radius = (cutoff * l as f64 + 1e-9).floor() as i64;
        let values = (-radius..=radius).map(|k| f(k as f64 / l as f64)).collect();
        Ok(Lattice1D { l, radius, values })
    }

    /// Frequency of slot `i`.
    pub fn point(&self, i: usize) -> f64 {
        (i as i64 - self.radius) as f64 / self.l as f64
    }

    /// `Σ|b_K|²`.
    pub fn sum_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Piecewise-linear interpolant of the trace at `ξ` (zero beyond the
    /// outermost points).
    pub fn interpolate(&self, xi: f64) -> C64 {
        let x = xi * self.l as f64 + self.radius as f64;
        if x < 0.0 || x > (self.values.len() - 1) as f64 {
            return C64::new(0.0, 0.0);
        }
        let i = (x.floor() as usize).min(self.values.len() - 2);
        let w = x - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    fn map(&self, f: impl Fn(f64, C64) -> C64) -> Lattice1D {
        Lattice1D {
            l: self.l,
            radius: self.radius,
            values: self.values.iter().enumerate().map(|(i, &v)| f(self.point(i), v)).collect(),
        }
    }
}

/// The gauge `c_K = b_K e^{−2iμε²Ss}` with `S = Σ|b_J|²`.
pub fn gauge(b: &Lattice1D, eps: f64, sign: Sign, s: f64) -> Lattice1D {
    let rot = C64::from_polar(1.0, -2.0 * sign.value() * eps * eps * b.sum_sq() * s);
    b.map(|_, v| v * rot)
}

/// Inverse of [`gauge`] (the mass of `c` equals that of `b`).
pub fn ungauge(c: &Lattice1D, eps: f64, sign: Sign, s: f64) -> Lattice1D {
    gauge(c, eps, sign, -s)
}

/// Result of [`onedim_resonant_evolve`].
#[derive(Clone, Debug)]
pub struct OneDimRun {
    /// Resonant-system state `b(s)`.
    pub b: Lattice1D,
    /// Gauged state `c(s)`.
    pub c: Lattice1D,
    /// `max_K |c_K(s) − c_K(0)e^{−iμε²|c_K(0)|²s}|`.
    pub closed_form_error: f64,
}

/// Time stepper for the 1D resonant system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OneDimStepper {
    /// Classical RK4 with steps of at most `ds`, further shrunk so that the
    /// fastest mode turns by at most 0.005 rad per step.
    Rk4 {
        /// Largest step.
        ds: f64,
    },
    /// Phase rotation `b_K ↦ b_K e^{iμε²(2S − |b_K|²)h}` over `steps` equal
    /// steps. The vector field rotates each mode at a rate fixed by the
    /// moduli, which it leaves unchanged, so every step is exact up to
    /// rounding.
    Rotation {
        /// Number of steps.
        steps: usize,
    },
}

/// Integrates the 1D resonant system `−i∂ₛb_K = μ ε²(2S − |b_K|²)b_K`
/// (the modes interact only through `S`), gauges the result and measures it
/// against the per-mode closed form.
pub fn onedim_resonant_evolve(b0: &Lattice1D, eps: f64, sign: Sign, s: f64, stepper: OneDimStepper) -> Result<OneDimRun> {
    if !(eps > 0.0) || !(s >= 0.0) {
        return Err(Error::InvalidParameter("need ε > 0 and s ≥ 0".into()));
    }
    let mu = sign.value();
    let rate = |b: &[C64], v: C64| {
        let total: f64 = b.iter().map(|v| v.norm_sqr()).sum();
        mu * eps * eps * (2.0 * total - v.norm_sqr())
    };
    let mut b = b0.values.clone();
    match stepper {
        OneDimStepper::Rk4 { ds } => {
            if !(ds > 0.0) {
                return Err(Error::InvalidParameter("RK4 step must be positive".into()));
            }
            let fastest = 2.0 * eps * eps * b0.sum_sq();
            let h_max = if fastest > 0.0 { ds.min(0.005 / fastest) } else { ds };
            let rhs = |b: &[C64]| -> Vec<C64> {
                let total: f64 = b.iter().map(|v| v.norm_sqr()).sum();
                b.iter().map(|&v| C64::new(0.0, mu * eps * eps * (2.0 * total - v.norm_sqr())) * v).collect()
            };
            let axpy = |b: &[C64], k: &[C64], h: f64| -> Vec<C64> { b.iter().zip(k).map(|(x, y)| x + y * h).collect() };
            let steps = (s / h_max).ceil() as usize;
            let h = if steps > 0 { s / steps as f64 } else { 0.0 };
            for _ in 0..steps {
                let k1 = rhs(&b);
                let k2 = rhs(&axpy(&b, &k1, h / 2.0));
                let k3 = rhs(&axpy(&b, &k2, h / 2.0));
                let k4 = rhs(&axpy(&b, &k3, h));
                for i in 0..b.len() {
                    b[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
                }
            }
        }
        OneDimStepper::Rotation { steps } => {
            if steps == 0 {
                return Err(Error::InvalidParameter("rotation stepper needs at least one step".into()));
            }
            let h = s / steps as f64;
            for _ in 0..steps {
                let frozen = b.clone();
                b.par_iter_mut().for_each(|v| *v *= C64::from_polar(1.0, rate(&frozen, *v) * h));
            }
        }
    }
    let b = Lattice1D { values: b, ..b0.clone() };
    let c = gauge(&b, eps, sign, s);
    let closed_form_error = b0
        .values
        .iter()
        .zip(&c.values)
        .map(|(&c0, &cs)| (cs - onedim_exact_value(c0, -mu * eps * eps * s)).norm())
        .fold(0.0, f64::max);
    Ok(OneDimRun { b, c, closed_form_error })
}

/// One row of the continuum scan.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScanRow {
    /// Box size.
    pub l: u32,
    /// `max_K |c_K − g(τ, K)|` at the lattice points.
    pub lattice_error: f64,
    /// `sup_ξ |I_L c(ξ) − g(τ, ξ)|` for the piecewise-linear interpolant,
    /// over `|ξ| ≤ window`.
    pub continuum_gap: f64,
}

/// For each `L`, runs the resonant system from `b_K = g₀(K)` to `s = τ/ε²`,
/// gauges, and compares the trace with the continuum solution
/// `g(−μτ, ξ) = g₀(ξ)e^{−iμτ|g₀(ξ)|²}`.
pub fn onedim_scan(
    g0: &(dyn Fn(f64) -> C64 + Sync),
    ls: &[u32],
    eps: f64,
    sign: Sign,
    tau: f64,
    cutoff: f64,
    stepper: OneDimStepper,
) -> Result<Vec<ScanRow>> {
    let window = 0.75 * cutoff;
    let probes = 4001;
    let mu = sign.value();
    ls.par_iter()
        .map(|&l| {
            let b0 = Lattice1D::from_fn(l, cutoff, g0)?;
            let s = tau / (eps * eps);
            let run = onedim_resonant_evolve(&b0, eps, sign, s, stepper)?;
            let lattice_error = run
                .c
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| (v - onedim_exact_value(g0(run.c.point(i)), -mu * tau)).norm())
                .fold(0.0, f64::max);
            let continuum_gap = (0..probes)
                .map(|j| {
                    let xi = -window + 2.0 * window * j as f64 / (probes - 1) as f64;
                    (run.c.interpolate(xi) - onedim_exact_value(g0(xi), -mu * tau)).norm()
                })
                .fold(0.0, f64::max);
            Ok(ScanRow { l, lattice_error, continuum_gap })
        })
        .collect()
}

/// Split-step solver for `−i∂ₜu + ∂²ₓu = μ ε²|u|²u` on `T_L` with `modes`
/// Fourier modes; states are coefficient arrays in FFT order.
#[derive(Clone)]
pub struct Nls1D {
    l: u32,
    eps: f64,
    sign: Sign,
    modes: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Nls1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Nls1D").field("l", &self.l).field("eps", &self.eps).field("modes", &self.modes).finish()
    }
}

impl Nls1D {
    /// Plans the transforms.
    pub fn new(l: u32, eps: f64, sign: Sign, modes: usize) -> Result<Self> {
        if l == 0 || !(eps >= 0.0) || modes < 4 || !modes.is_multiple_of(2) {
            return Err(Error::InvalidParameter("1D NLS needs L ≥ 1, ε ≥ 0 and an even mode count ≥ 4".into()));
        }
        let mut planner = FftPlanner::new();
        Ok(Nls1D { l, eps, sign, modes, forward: planner.plan_fft_forward(modes), inverse: planner.plan_fft_inverse(modes) })
    }

    fn freq(&self, j: usize) -> f64 {
        crate::numerics::fft_freq(j, self.modes) as f64 / self.l as f64
    }

    /// Coefficients of a lattice sequence (its radius must fit in the band).
    pub fn to_spectral(&self, a: &Lattice1D) -> Result<Vec<C64>> {
        if a.l != self.l || a.radius >= (self.modes / 2) as i64 {
            return Err(Error::InvalidInput("sequence does not fit the 1D solver".into()));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.modes];
        for (i, &v) in a.values.iter().enumerate() {
            let k = i as i64 - a.radius;
            out[k.rem_euclid(self.modes as i64) as usize] = v;
        }
        Ok(out)
    }

    /// Restriction to the slots of `like`.
    pub fn to_lattice(&self, a: &[C64], like: &Lattice1D) -> Lattice1D {
        let values = (0..like.values.len())
            .map(|i| a[(i as i64 - like.radius).rem_euclid(self.modes as i64) as usize])
            .collect();
        Lattice1D { values, ..like.clone() }
    }

    /// One Strang step of length `dt`.
    pub fn step(&self, a: &mut [C64], dt: f64) {
        let lin = |a: &mut [C64], tau: f64| {
            for (j, v) in a.iter_mut().enumerate() {
                let k = self.freq(j);
                *v *= C64::from_polar(1.0, 4.0 * PI * PI * k * k * tau);
            }
        };
        lin(a, dt / 2.0);
        let l = self.l as f64;
        self.inverse.process(a);
        let c = self.sign.value() * self.eps * self.eps * dt;
        for v in a.iter_mut() {
            let u = *v / l;
            *v = u * C64::from_polar(1.0, c * u.norm_sqr());
        }
        self.forward.process(a);
        let s = l / self.modes as f64;
        a.iter_mut().for_each(|v| *v *= s);
        lin(a, dt / 2.0);
    }
}

/// Full pipeline: 1D NLS from `a_K = g₀(K)` up to NLS time `L²τ/ε²`,
/// interaction picture, gauge, and comparison with the continuum solution at
/// the lattice points. Returns `max_K |c_K − g(−μτ, K)|`. The mode count
/// must exceed four times the datum's index radius so that the cubic term
/// does not alias back onto the datum's support.
pub fn onedim_nls_pipeline(
    g0: &(dyn Fn(f64) -> C64 + Sync),
    l: u32,
    eps: f64,
    sign: Sign,
    tau: f64,
    cutoff: f64,
    modes: usize,
    dt: f64,
) -> Result<f64> {
    let solver = Nls1D::new(l, eps, sign, modes)?;
    let a0 = Lattice1D::from_fn(l, cutoff, g0)?;
    if modes as i64 <= 4 * a0.radius {
        return Err(Error::InvalidParameter(format!("{modes} modes alias a datum of index radius {}", a0.radius)));
    }
    let mut a = solver.to_spectral(&a0)?;
    let s = tau / (eps * eps);
    let t_final = (l as f64).powi(2) * s;
    let steps = (t_final / dt).ceil() as usize;
    let h = t_final / steps as f64;
    for _ in 0..steps {
        solver.step(&mut a, h);
    }
    let lf = l as f64;
    let b = solver.to_lattice(&a, &a0).map(|k, v| v * C64::from_polar(1.0, -4.0 * PI * PI * lf * lf * k * k * s));
    let c = gauge(&b, eps, sign, s);
    let mu = sign.value();
    Ok(c.values
        .iter()
        .enumerate()
        .map(|(i, v)| (v - onedim_exact_value(g0(c.point(i)), -mu * tau)).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn envelope(xi: f64) -> C64 {
        C64::new(1.3 * (-xi * xi / 2.0).exp(), 0.4 * xi * (-xi * xi).exp())
    }

    #[test]
    fn exact_solution_examples() {
        let zero = Line1DField::from_fn(3.0, 8, 2.0, |_| C64::new(0.0, 0.0)).unwrap();
        assert!(onedim_exact(&zero, 5.0).values().iter().all(|v| *v == C64::new(0.0, 0.0)));
        let two = onedim_exact_value(C64::new(2.0, 0.0), 0.3);
        assert!((two - 2.0 * C64::from_polar(1.0, 1.2)).norm() < 1e-15);
        let g = Line1DField::from_fn(5.0, 64, 2.0, envelope).unwrap();
        let gt = onedim_exact(&g, 2.7);
        for (a, b) in g.values().iter().zip(gt.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-14);
        }
        assert!(Line1DField::from_fn(5.0, 64, 1.0, envelope).is_err());
    }

    #[test]
    fn single_mode_matches_closed_form() {
        let b0 = Lattice1D::from_fn(4, 0.1, |_| C64::new(0.8, 0.3)).unwrap();
        assert_eq!(b0.values.len(), 1);
        for sign in [Sign::Focusing, Sign::Defocusing] {
            let run = onedim_resonant_evolve(&b0, 0.5, sign, 3.0, OneDimStepper::Rotation { steps: 1000 }).unwrap();
            assert!(run.closed_form_error < 1e-13, "{}", run.closed_form_error);
        }
    }

    #[test]
    fn action_variables_are_invariant() {
        let b0 = Lattice1D::from_fn(8, 3.0, envelope).unwrap();
        let rk = onedim_resonant_evolve(&b0, 0.3, Sign::Focusing, 10.0, OneDimStepper::Rk4 { ds: 0.01 }).unwrap();
        let rot = onedim_resonant_evolve(&b0, 0.3, Sign::Focusing, 10.0, OneDimStepper::Rotation { steps: 100 }).unwrap();
        for ((a, b), c) in b0.values.iter().zip(&rk.b.values).zip(&rot.b.values) {
            assert!((a.norm() - b.norm()).abs() < 1e-9);
            assert!((a.norm() - c.norm()).abs() < 1e-14);
            assert!((b - c).norm() < 1e-8);
        }
        assert!(rk.closed_form_error < 1e-8, "{}", rk.closed_form_error);
        assert!(rot.closed_form_error < 1e-12, "{}", rot.closed_form_error);
    }

    #[test]
    fn gauge_round_trip() {
        let b = Lattice1D::from_fn(8, 3.0, envelope).unwrap();
        let back = ungauge(&gauge(&b, 0.2, Sign::Focusing, 7.0), 0.2, Sign::Focusing, 7.0);
        for (x, y) in b.values.iter().zip(&back.values) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn continuum_gap_shrinks_with_the_box() {
        let rows = onedim_scan(&envelope, &[16, 64, 256], 0.1, Sign::Focusing, 1.0, 6.0, OneDimStepper::Rotation { steps: 50 }).unwrap();
        for r in &rows {
            assert!(r.lattice_error < 1e-10, "{r:?}");
        }
        assert!(rows[0].continuum_gap > rows[1].continuum_gap && rows[1].continuum_gap > rows[2].continuum_gap, "{rows:?}");
    }

    #[test]
    fn split_step_free_flow_is_exact() {
        let a0 = Lattice1D::from_fn(4, 2.0, envelope).unwrap();
        let s = Nls1D::new(4, 0.0, Sign::Focusing, 32).unwrap();
        let mut a = s.to_spectral(&a0).unwrap();
        for _ in 0..100 {
            s.step(&mut a, 0.01);
        }
        let out = s.to_lattice(&a, &a0);
        for (i, (x, y)) in a0.values.iter().zip(&out.values).enumerate() {
            let k = a0.point(i);
            assert!((x * C64::from_polar(1.0, 4.0 * PI * PI * k * k) - y).norm() < 1e-12);
        }
    }
}
