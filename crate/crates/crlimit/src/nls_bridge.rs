//! The cubic Schrödinger equation on the box `T²_L` and its comparison with
//! the continuous resonant dynamics.
//!
//! Conventions: `u = L^{-2} Σ_K a_K e^{2πiK·x}` with `K ∈ Z²_L`, and
//! `−i∂ₜu + Δu = ±ε²|u|²u` (`+` defocusing). The free flow is
//! `a_K(t) = e^{4π²i|K|²t} a_K(0)`; the interaction profile removes that
//! phase. On the profile the resonant part of the nonlinearity is
//! `T_L(ã, ã, ã)/T*` with `T* = ζ(2)L²/(2ε² log L)`, so in the rescaled time
//! `τ = t/T*` the resonant system reads `−i∂_τ b = ±T_L(b, b, b)` and its
//! large-box limit is the continuous equation `−i∂_τ g = ±T(g, g, g)`.
//!
//! The solver is a Strang splitting whose two sub-flows are solved exactly:
//! the linear phase on the Fourier side and the pointwise phase
//! `e^{±iε²|u|²τ}` on the physical grid. Both are unitary, so the `ℓ²` mass
//! is conserved to rounding.

use std::f64::consts::PI;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cr_dynamics::{evolve_expansion, Expansion};
use crate::cr_operator::{self, spectral_derivative, t_apply, GridField, QuadratureSpec};
use crate::error::{Error, Result};
use crate::lattice_resonance::{
    t_l_apply, t_l_at, t_l_cubic_symmetric, x_sigma_norm_lattice, Idx, LatticeField, LatticeParams, ZETA2,
};
use crate::numerics::{fft_freq, Fft2};

/// Sign of the nonlinearity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    /// `−i∂ₜu + Δu = +ε²|u|²u`.
    Defocusing,
    /// `−i∂ₜu + Δu = −ε²|u|²u`.
    Focusing,
}

impl Sign {
    /// `+1` or `−1`.
    pub fn value(self) -> f64 {
        match self {
            Sign::Defocusing => 1.0,
            Sign::Focusing => -1.0,
        }
    }
}

/// Box, nonlinearity and discretisation of a split-step run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NlsConfig {
    /// Box size `L` (period of the torus).
    pub l: u32,
    /// Nonlinearity strength `ε`.
    pub eps: f64,
    /// Sign of the nonlinearity.
    pub sign: Sign,
    /// Fourier modes (grid points) per axis; even.
    pub modes: usize,
    /// Time step of one Strang step.
    pub dt: f64,
    /// Evaluate the cubic phase on a 3/2-padded grid and truncate. This
    /// removes quadratic aliasing but the truncation makes the step only
    /// approximately unitary.
    #[serde(default)]
    pub padded: bool,
}

impl NlsConfig {
    /// Checks the invariants.
    pub fn validate(&self) -> Result<()> {
        if self.l == 0 {
            return Err(Error::InvalidParameter("box size must be positive".into()));
        }
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::InvalidParameter(format!("ε must be positive, got {}", self.eps)));
        }
        if self.modes < 4 || !self.modes.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("modes per axis must be even and ≥ 4, got {}", self.modes)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {}", self.dt)));
        }
        Ok(())
    }

    /// `T* = ζ(2)L²/(2ε² log L)`; needs `L ≥ 2`.
    pub fn t_star(&self) -> Result<f64> {
        t_star(self.l, self.eps)
    }
}

/// `T* = ζ(2)L²/(2ε² log L)`.
pub fn t_star(l: u32, eps: f64) -> Result<f64> {
    if l < 2 {
        return Err(Error::InvalidParameter("T* needs L ≥ 2".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("T* needs ε > 0".into()));
    }
    let l = l as f64;
    Ok(ZETA2 * l * l / (2.0 * eps * eps * l.ln()))
}

/// Split-step propagator for one configuration. States are `modes × modes`
/// arrays of Fourier coefficients `a_K` in FFT order (row: first component).
#[derive(Clone, Debug)]
pub struct NlsSolver {
    cfg: NlsConfig,
    fft: Fft2,
    fft_pad: Option<Fft2>,
    k2: Vec<f64>,
    half_step: Vec<C64>,
}

impl NlsSolver {
    /// Plans the transforms and the half-step linear phases.
    pub fn new(cfg: NlsConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.modes;
        let l = cfg.l as f64;
        let mut k2 = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let (kx, ky) = (fft_freq(i, n) as f64 / l, fft_freq(j, n) as f64 / l);
                k2[i * n + j] = kx * kx + ky * ky;
            }
        }
        let half_step = k2.iter().map(|&q| C64::from_polar(1.0, 4.0 * PI * PI * q * cfg.dt / 2.0)).collect();
        let fft_pad = cfg.padded.then(|| Fft2::new(3 * n / 2));
        Ok(NlsSolver { cfg, fft: Fft2::new(n), fft_pad, k2, half_step })
    }

    /// The configuration.
    pub fn config(&self) -> &NlsConfig {
        &self.cfg
    }

    /// Spectral array of a lattice field; the field's ball must fit strictly
    /// inside the resolved band.
    pub fn to_spectral(&self, a: &LatticeField) -> Result<Vec<C64>> {
        let n = self.cfg.modes;
        if a.params().l != self.cfg.l {
            return Err(Error::InvalidInput("field and solver use different box sizes".into()));
        }
        if a.params().radius() >= (n / 2) as i64 {
            return Err(Error::InvalidInput(format!(
                "cutoff ball (index radius {}) does not fit in {n} modes",
                a.params().radius()
            )));
        }
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for (k, v) in a.entries() {
            out[slot(k, n)] = v;
        }
        Ok(out)
    }

    /// Restriction of a spectral array to the cutoff ball of `params`.
    pub fn to_lattice(&self, a: &[C64], params: LatticeParams) -> LatticeField {
        let n = self.cfg.modes;
        LatticeField::from_index_fn(params, |k| {
            if k[0].abs() < (n / 2) as i64 && k[1].abs() < (n / 2) as i64 {
                a[slot(k, n)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Exact free flow over `tau`.
    pub fn linear(&self, a: &mut [C64], tau: f64) {
        if tau == self.cfg.dt / 2.0 {
            a.iter_mut().zip(&self.half_step).for_each(|(v, p)| *v *= p);
        } else {
            a.iter_mut().zip(&self.k2).for_each(|(v, &q)| *v *= C64::from_polar(1.0, 4.0 * PI * PI * q * tau));
        }
    }

    /// Exact cubic phase `u ↦ u e^{±iε²|u|²τ}` at the grid nodes.
    pub fn nonlinear(&self, a: &mut [C64], tau: f64) {
        let c = self.cfg.sign.value() * self.cfg.eps * self.cfg.eps * tau;
        let l2 = (self.cfg.l as f64).powi(2);
        match &self.fft_pad {
            None => {
                let n = self.cfg.modes;
                self.fft.inverse(a);
                for v in a.iter_mut() {
                    let u = *v / l2;
                    *v = u * C64::from_polar(1.0, c * u.norm_sqr());
                }
                self.fft.forward(a);
                let s = l2 / (n * n) as f64;
                a.iter_mut().for_each(|v| *v *= s);
            }
            Some(pad) => {
                let n = self.cfg.modes;
                let m = pad.n();
                let mut big = vec![C64::new(0.0, 0.0); m * m];
                for i in 0..n {
                    for j in 0..n {
                        let k = [fft_freq(i, n), fft_freq(j, n)];
                        big[slot(k, m)] = a[i * n + j];
                    }
                }
                pad.inverse(&mut big);
                for v in big.iter_mut() {
                    let u = *v / l2;
                    *v = u * C64::from_polar(1.0, c * u.norm_sqr());
                }
                pad.forward(&mut big);
                let s = l2 / (m * m) as f64;
                for i in 0..n {
                    for j in 0..n {
                        let k = [fft_freq(i, n), fft_freq(j, n)];
                        a[i * n + j] = big[slot(k, m)] * s;
                    }
                }
            }
        }
    }

    /// One Strang step of length `tau`: half linear, full cubic, half linear.
    pub fn step(&self, a: &mut [C64], tau: f64) {
        self.linear(a, tau / 2.0);
        self.nonlinear(a, tau);
        self.linear(a, tau / 2.0);
    }

    /// `Σ_K |a_K|²` (equal to `L²∫|u|²`).
    pub fn mass(&self, a: &[C64]) -> f64 {
        a.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `∫|∇u|² ± (ε²/2)∫|u|⁴`, the conserved energy of the continuous flow.
    pub fn energy(&self, a: &[C64]) -> f64 {
        let n = self.cfg.modes;
        let l = self.cfg.l as f64;
        let kinetic: f64 = a.iter().zip(&self.k2).map(|(v, q)| 4.0 * PI * PI * q * v.norm_sqr()).sum::<f64>() / (l * l);
        let mut u = a.to_vec();
        self.fft.inverse(&mut u);
        let cell = (l / n as f64).powi(2);
        let quartic: f64 = u.iter().map(|v| (v.norm_sqr() / (l * l * l * l)).powi(2)).sum::<f64>() * cell;
        kinetic + self.cfg.sign.value() * self.cfg.eps * self.cfg.eps / 2.0 * quartic
    }

    /// Fraction of the mass carried by modes beyond two thirds of the band,
    /// where aliasing of the cubic term sets in.
    pub fn outer_fraction(&self, a: &[C64]) -> f64 {
        let n = self.cfg.modes;
        let edge = (n / 3) as i64;
        let mut outer = 0.0;
        for i in 0..n {
            for j in 0..n {
                if fft_freq(i, n).abs() > edge || fft_freq(j, n).abs() > edge {
                    outer += a[i * n + j].norm_sqr();
                }
            }
        }
        let total = self.mass(a);
        if total > 0.0 {
            outer / total
        } else {
            0.0
        }
    }
}

#[inline]
fn slot(k: Idx, n: usize) -> usize {
    let w = |x: i64| x.rem_euclid(n as i64) as usize;
    w(k[0]) * n + w(k[1])
}

/// Outer-band mass fraction above which a run is flagged as aliased.
pub const ALIASING_THRESHOLD: f64 = 1e-10;

/// Samples of a split-step run.
#[derive(Clone, Debug)]
pub struct NlsTrajectory {
    /// Sample times.
    pub times: Vec<f64>,
    /// Coefficients at the sample times, restricted to the input's ball.
    pub states: Vec<LatticeField>,
    /// `Σ|a_K|²` at the sample times.
    pub mass: Vec<f64>,
    /// Energy at the sample times.
    pub energy: Vec<f64>,
    /// Largest outer-band fraction seen.
    pub max_outer_fraction: f64,
    /// Whether the outer band exceeded [`ALIASING_THRESHOLD`].
    pub aliasing_flag: bool,
}

/// Evolves `u0` to `t_final` with steps of `cfg.dt` (the last one shortened),
/// sampling every `every` steps and at the end.
pub fn nls_evolve(u0: &LatticeField, cfg: &NlsConfig, t_final: f64, every: usize) -> Result<NlsTrajectory> {
    if !(t_final >= 0.0) {
        return Err(Error::InvalidParameter("final time must be non-negative".into()));
    }
    let solver = NlsSolver::new(*cfg)?;
    let params = *u0.params();
    let mut a = solver.to_spectral(u0)?;
    let every = every.max(1);
    let mut out = NlsTrajectory {
        times: vec![0.0],
        states: vec![u0.clone()],
        mass: vec![solver.mass(&a)],
        energy: vec![solver.energy(&a)],
        max_outer_fraction: solver.outer_fraction(&a),
        aliasing_flag: false,
    };
    let full = (t_final / cfg.dt).floor() as usize;
    let rest = t_final - full as f64 * cfg.dt;
    let total = full + usize::from(rest > 1e-12 * cfg.dt);
    let mut t = 0.0;
    for s in 1..=total {
        let tau = if s <= full { cfg.dt } else { rest };
        solver.step(&mut a, tau);
        t = if s <= full { s as f64 * cfg.dt } else { t_final };
        if s % every == 0 || s == total {
            out.times.push(t);
            out.states.push(solver.to_lattice(&a, params));
            out.mass.push(solver.mass(&a));
            out.energy.push(solver.energy(&a));
            out.max_outer_fraction = out.max_outer_fraction.max(solver.outer_fraction(&a));
        }
    }
    let _ = t;
    out.aliasing_flag = out.max_outer_fraction > ALIASING_THRESHOLD;
    Ok(out)
}

/// Interaction profile `ã_K = e^{−4π²i|K|²t} a_K`.
pub fn interaction_profile(a: &LatticeField, t: f64) -> LatticeField {
    a.map(|k, v| v * C64::from_polar(1.0, -4.0 * PI * PI * (k[0] * k[0] + k[1] * k[1]) * t))
}

/// Inverse of [`interaction_profile`].
pub fn wind_profile(a: &LatticeField, t: f64) -> LatticeField {
    interaction_profile(a, -t)
}

/// Samples of a resonant-system run.
#[derive(Clone, Debug)]
pub struct ResonantTrajectory {
    /// Sample times.
    pub times: Vec<f64>,
    /// States at the sample times.
    pub states: Vec<LatticeField>,
    /// `Σ|b_K|²`.
    pub mass: Vec<f64>,
    /// `¼ Re Σ conj(b_K) T_L(b,b,b)_K`.
    pub hamiltonian: Vec<f64>,
}

/// RK4 for `−i∂ₜb = c·T_L(b, b, b)` landing exactly on `sample_times`
/// (increasing, non-negative) with steps at most `dt`.
fn resonant_flow(b0: &LatticeField, c: f64, sample_times: &[f64], dt: f64) -> Result<ResonantTrajectory> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter("time step must be positive".into()));
    }
    if sample_times.windows(2).any(|w| w[1] < w[0]) || sample_times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidInput("sample times must be non-negative and increasing".into()));
    }
    let symmetric = b0.is_d4_symmetric();
    let op = |b: &LatticeField| -> Result<LatticeField> {
        if symmetric {
            t_l_cubic_symmetric(b)
        } else {
            t_l_apply(b, b, b)
        }
    };
    let ic = C64::new(0.0, c);
    let ham = |b: &LatticeField, tb: &LatticeField| 0.25 * b.inner(tb).re;
    let mut out = ResonantTrajectory { times: vec![], states: vec![], mass: vec![], hamiltonian: vec![] };
    let mut b = b0.clone();
    let mut t = 0.0;
    let mut tb = op(&b)?;
    let record = |t: f64, b: &LatticeField, tb: &LatticeField, out: &mut ResonantTrajectory| {
        out.times.push(t);
        out.states.push(b.clone());
        out.mass.push(b.sum_sq());
        out.hamiltonian.push(ham(b, tb));
    };
    for &target in sample_times {
        let span = target - t;
        let steps = (span / dt).ceil() as usize;
        if steps > 0 {
            let h = span / steps as f64;
            for _ in 0..steps {
                let k1 = tb.scaled(ic);
                let k2 = op(&b.add_scaled(&k1, C64::new(h / 2.0, 0.0)))?.scaled(ic);
                let k3 = op(&b.add_scaled(&k2, C64::new(h / 2.0, 0.0)))?.scaled(ic);
                let k4 = op(&b.add_scaled(&k3, C64::new(h, 0.0)))?.scaled(ic);
                b = b
                    .add_scaled(&k1, C64::new(h / 6.0, 0.0))
                    .add_scaled(&k2, C64::new(h / 3.0, 0.0))
                    .add_scaled(&k3, C64::new(h / 3.0, 0.0))
                    .add_scaled(&k4, C64::new(h / 6.0, 0.0));
                tb = op(&b)?;
            }
        }
        t = target;
        record(t, &b, &tb, &mut out);
    }
    Ok(out)
}

/// Integrates the resonant system `−i∂ₛb = ±ε² T_L(b, b, b)` in the rescaled
/// time `s` (NLS time `t = ζ(2)L²s/(2 log L)`, so that `ε²s = t/T*`) with
/// RK4 steps of at most `ds`, sampling every `every` steps. Fields invariant
/// under the lattice symmetries use the orbit-reduced operator.
pub fn rs_evolve(b0: &LatticeField, cfg: &NlsConfig, s_final: f64, ds: f64, every: usize) -> Result<ResonantTrajectory> {
    if !(s_final >= 0.0) {
        return Err(Error::InvalidParameter("final time must be non-negative".into()));
    }
    if !(cfg.eps > 0.0) {
        return Err(Error::InvalidParameter("ε must be positive".into()));
    }
    let steps = (s_final / ds).ceil().max(0.0) as usize;
    let every = every.max(1);
    let mut samples: Vec<f64> = vec![0.0];
    for s in 1..=steps {
        if s % every == 0 || s == steps {
            samples.push(s_final * s as f64 / steps as f64);
        }
    }
    resonant_flow(b0, cfg.sign.value() * cfg.eps * cfg.eps, &samples, ds)
}

/// Where the discrete–continuous gap is evaluated.
#[derive(Clone, Debug, PartialEq)]
pub enum GapPoints {
    /// Every index of the cutoff ball.
    Ball,
    /// The given indices.
    Indices(Vec<Idx>),
}

/// Fixed probe frequencies used by gap scans; all are multiples of `1/8`, so
/// they are lattice points for every `L` divisible by 8.
pub const GAP_PROBES: [[f64; 2]; 8] =
    [[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [1.0, 0.5], [1.5, 1.0], [2.0, 0.0], [0.0, 2.5], [3.0, 1.0]];

/// Indices of the [`GAP_PROBES`] that are lattice points inside the ball.
pub fn gap_probe_indices(params: &LatticeParams) -> Result<Vec<Idx>> {
    let l = params.l as f64;
    let out: Vec<Idx> = GAP_PROBES
        .iter()
        .filter_map(|p| {
            let k = [p[0] * l, p[1] * l];
            let idx = [k[0].round() as i64, k[1].round() as i64];
            ((k[0] - idx[0] as f64).abs() < 1e-9 && (k[1] - idx[1] as f64).abs() < 1e-9 && params.contains(idx))
                .then_some(idx)
        })
        .collect();
    if out.is_empty() {
        return Err(Error::InvalidInput(format!("no probe frequency is a lattice point for L = {}", params.l)));
    }
    Ok(out)
}

/// `sup_K ⟨K⟩^σ |T(g,g,g)(K) − T_L(g,g,g)(K)|` over `points`, with `g`
/// sampled on `Z²_L` for the discrete operator and evaluated through its own
/// evaluator for the continuous one.
pub fn tl_vs_t_gap(g: &GridField, params: &LatticeParams, quad: &QuadratureSpec, points: &GapPoints) -> Result<f64> {
    let trace = LatticeField::from_fn(*params, |p| g.eval(p));
    let ks = match points {
        GapPoints::Ball => params.ball(),
        GapPoints::Indices(v) => v.clone(),
    };
    let discrete = t_l_at(&trace, &trace, &trace, &ks)?;
    let mut gap = 0.0f64;
    for (k, d) in ks.iter().zip(discrete) {
        let p = params.point(*k);
        let c = t_apply(g, g, g, p, quad)?;
        let w = (1.0 + p[0] * p[0] + p[1] * p[1]).powf(params.sigma / 2.0);
        gap = gap.max(w * (c - d).norm());
    }
    Ok(gap)
}

/// Which comparison legs an experiment runs besides the free one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Legs {
    /// Split-step NLS.
    pub full: bool,
    /// Resonant system.
    pub resonant: bool,
}

/// A comparison experiment between the box dynamics and the continuous
/// resonant equation.
#[derive(Clone, Debug)]
pub struct ApproxRun {
    /// Continuous datum `g₀`, sampled at `K` for the lattice legs.
    pub g0: GridField,
    /// Horizon `M` in rescaled time `τ = t/T*`.
    pub horizon: f64,
    /// Exponent `γ ∈ (0, 1)` of the regime condition `ε < L^{−1−γ}/B`.
    pub gamma: f64,
    /// Weight exponent of the comparison norm.
    pub sigma: f64,
    /// Frequency cutoff of the lattice fields.
    pub cutoff: f64,
    /// Number of log-spaced comparison times in `[10⁻³, M]`.
    pub samples: usize,
    /// Hermite levels of the continuous leg.
    pub levels: usize,
    /// Step of the continuous leg.
    pub cr_dt: f64,
    /// Step of the resonant leg (in `τ`).
    pub rs_dt: f64,
    /// Legs to run.
    pub legs: Legs,
    /// Step budget of the NLS leg; beyond it the leg is skipped and flagged.
    pub max_nls_steps: u64,
}

impl ApproxRun {
    /// A run with default discretisation settings.
    pub fn new(g0: GridField, horizon: f64) -> Self {
        ApproxRun {
            g0,
            horizon,
            gamma: 0.5,
            sigma: 3.0,
            cutoff: 4.0,
            samples: 6,
            levels: 24,
            cr_dt: 0.01,
            rs_dt: 0.05,
            legs: Legs { full: true, resonant: true },
            max_nls_steps: 5_000_000,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon > 1e-3) {
            return Err(Error::InvalidParameter("horizon must exceed 10⁻³".into()));
        }
        if !(0.0 < self.gamma && self.gamma < 1.0) {
            return Err(Error::InvalidParameter("γ must lie in (0, 1)".into()));
        }
        if self.samples < 2 || self.levels == 0 || !(self.cr_dt > 0.0) || !(self.rs_dt > 0.0) {
            return Err(Error::InvalidParameter("samples ≥ 2, levels ≥ 1 and positive steps required".into()));
        }
        Ok(())
    }

    /// Log-spaced comparison times `τ_i ∈ [10⁻³, M]`.
    pub fn sample_times(&self) -> Vec<f64> {
        let (a, b) = (1e-3f64.ln(), self.horizon.ln());
        (0..self.samples).map(|i| (a + (b - a) * i as f64 / (self.samples - 1) as f64).exp()).collect()
    }
}

/// Outcome of [`approx_experiment`]; errors are `X^σ_L` distances at the
/// comparison times.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApproxReport {
    /// Box size.
    pub l: u32,
    /// Nonlinearity strength.
    pub eps: f64,
    /// Sign of the nonlinearity.
    pub sign: Sign,
    /// `T*`.
    pub t_star: f64,
    /// Horizon `M`.
    pub horizon: f64,
    /// Regime exponent.
    pub gamma: f64,
    /// Weight exponent.
    pub sigma: f64,
    /// Frequency cutoff.
    pub cutoff: f64,
    /// `sup_τ ‖g(τ)‖_{X^σ} + ‖∇g(τ)‖_{X^σ}` measured on the continuous leg.
    pub bound_b: f64,
    /// Whether `ε < L^{−1−γ}/B`.
    pub in_regime: bool,
    /// Weighted size of the datum's trace just beyond the cutoff.
    pub trace_tail: f64,
    /// Comparison times in `τ`.
    pub tau: Vec<f64>,
    /// Comparison times in NLS time.
    pub t: Vec<f64>,
    /// `‖g₀ − g(τ)‖` (no dynamics at all).
    pub err_free: Vec<f64>,
    /// `‖b(τ) − g(τ)‖` for the resonant system.
    pub err_resonant: Option<Vec<f64>>,
    /// `‖ã(τT*) − g(τ)‖` for the NLS profile.
    pub err_full: Option<Vec<f64>>,
    /// `‖ã(τT*) − b(τ)‖`.
    pub full_vs_resonant: Option<Vec<f64>>,
    /// Relative NLS mass drift.
    pub mass_drift: Option<Vec<f64>>,
    /// Relative NLS energy drift.
    pub energy_drift: Option<Vec<f64>>,
    /// Outer-band fraction of the NLS leg.
    pub max_outer_fraction: Option<f64>,
    /// Split-step steps taken or required.
    pub nls_steps: u64,
    /// Remarks (skipped legs, regime).
    pub notes: Vec<String>,
}

impl ApproxReport {
    /// Writes the series as CSV (`tau,t,err_free,err_resonant,err_full,...`).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["tau", "t", "err_free", "err_resonant", "err_full", "full_vs_resonant", "mass_drift", "energy_drift"])?;
        let opt = |v: &Option<Vec<f64>>, i: usize| v.as_ref().map(|v| format!("{:.12e}", v[i])).unwrap_or_default();
        for i in 0..self.tau.len() {
            w.write_record([
                format!("{:.12e}", self.tau[i]),
                format!("{:.12e}", self.t[i]),
                format!("{:.12e}", self.err_free[i]),
                opt(&self.err_resonant, i),
                opt(&self.err_full, i),
                opt(&self.full_vs_resonant, i),
                opt(&self.mass_drift, i),
                opt(&self.energy_drift, i),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the report as pretty JSON.
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(serde_json::to_string_pretty(self)?.as_bytes())?;
        Ok(())
    }
}

/// Continuous-leg solution at the given rescaled times. For the focusing
/// sign the equation is `−i∂_τ g = −T(g)`, whose solution is the conjugate of
/// the defocusing flow of the conjugate datum.
fn cr_leg(g0: &GridField, sign: Sign, taus: &[f64], levels: usize, dt: f64) -> Result<Vec<Expansion>> {
    let mut e = Expansion::project(g0, levels, 1.0);
    let conj = |e: &mut Expansion| e.coeffs.iter_mut().for_each(|c| *c = c.conj());
    if sign == Sign::Focusing {
        conj(&mut e);
    }
    let mut out = Vec::with_capacity(taus.len());
    let mut t = 0.0;
    for &tau in taus {
        if tau > t {
            let tr = evolve_expansion(&e, tau - t, dt, usize::MAX)?;
            e = tr.states.last().cloned().expect("trajectory has a final state");
        }
        t = tau;
        let mut v = e.clone();
        if sign == Sign::Focusing {
            conj(&mut v);
        }
        out.push(v);
    }
    Ok(out)
}

/// `‖g‖_{X^σ} + ‖∇g‖_{X^σ}` of an expansion, on a grid covering `[−B, B]²`.
fn weighted_bound(e: &Expansion, sigma: f64, box_half: f64) -> Result<f64> {
    let f = e.lift(box_half, 64)?;
    let dx = spectral_derivative(&f, 0);
    let dy = spectral_derivative(&f, 1);
    let mut grad = 0.0f64;
    for i in 0..f.n() {
        for j in 0..f.n() {
            let p = f.node(i, j);
            let w = (1.0 + p[0] * p[0] + p[1] * p[1]).powf(sigma / 2.0);
            let ij = i * f.n() + j;
            grad = grad.max(w * (dx[ij].norm_sqr() + dy[ij].norm_sqr()).sqrt());
        }
    }
    Ok(cr_operator::x_sigma_norm(&f, sigma) + grad)
}

/// Full comparison pipeline: evolve the continuous equation to the horizon,
/// the resonant system and the NLS with data `g₀(K)`, unwind the free phases
/// and compare in `X^σ_L` at log-spaced rescaled times.
pub fn approx_experiment(run: &ApproxRun, cfg: &NlsConfig) -> Result<ApproxReport> {
    run.validate()?;
    cfg.validate()?;
    let t_star = cfg.t_star()?;
    let params = LatticeParams::new(cfg.l, run.cutoff, run.sigma)?;
    let taus = run.sample_times();
    let mut notes = Vec::new();

    let cr = cr_leg(&run.g0, cfg.sign, &taus, run.levels, run.cr_dt)?;
    let box_half = run.cutoff.max(6.0);
    let mut bound_b = weighted_bound(&cr_leg(&run.g0, cfg.sign, &[0.0], run.levels, run.cr_dt)?[0], run.sigma, box_half)?;
    for e in &cr {
        bound_b = bound_b.max(weighted_bound(e, run.sigma, box_half)?);
    }
    let in_regime = cfg.eps < (cfg.l as f64).powf(-1.0 - run.gamma) / bound_b;
    if !in_regime {
        notes.push("outside the approximation regime: ε ≥ L^{-1-γ}/B".into());
    }
    notes.push("comparison is trend-based: the asymptotic horizon and constants are not reachable at desk scale".into());

    let targets: Vec<LatticeField> = cr.iter().map(|e| LatticeField::from_fn(params, |p| e.eval(p))).collect();
    let a0 = LatticeField::from_fn(params, |p| run.g0.eval(p));
    let trace_tail = trace_tail(&run.g0, &params);
    let dist = |a: &LatticeField, b: &LatticeField| x_sigma_norm_lattice(&a.sub(b), run.sigma);
    let err_free: Vec<f64> = targets.iter().map(|g| dist(&a0, g)).collect();

    let resonant = if run.legs.resonant {
        Some(resonant_flow(&a0, cfg.sign.value(), &taus, run.rs_dt)?.states)
    } else {
        None
    };
    let err_resonant = resonant.as_ref().map(|bs| bs.iter().zip(&targets).map(|(b, g)| dist(b, g)).collect());

    let t: Vec<f64> = taus.iter().map(|tau| tau * t_star).collect();
    let steps_needed = (t.last().copied().unwrap_or(0.0) / cfg.dt).ceil() as u64;
    let mut full = None;
    let (mut mass_drift, mut energy_drift, mut max_outer) = (None, None, None);
    if run.legs.full {
        if steps_needed > run.max_nls_steps {
            notes.push(format!(
                "NLS leg skipped: {steps_needed} steps of {} needed to reach τ = {} (budget {})",
                cfg.dt, run.horizon, run.max_nls_steps
            ));
        } else {
            let solver = NlsSolver::new(*cfg)?;
            let mut a = solver.to_spectral(&a0)?;
            let (m0, e0) = (solver.mass(&a), solver.energy(&a));
            let (mut states, mut md, mut ed) = (Vec::new(), Vec::new(), Vec::new());
            let mut outer = solver.outer_fraction(&a);
            let mut now = 0.0;
            for &target in &t {
                let steps = ((target - now) / cfg.dt).ceil() as usize;
                if steps > 0 {
                    let h = (target - now) / steps as f64;
                    for _ in 0..steps {
                        solver.step(&mut a, h);
                    }
                }
                now = target;
                states.push(interaction_profile(&solver.to_lattice(&a, params), now));
                md.push((solver.mass(&a) - m0).abs() / m0);
                ed.push((solver.energy(&a) - e0).abs() / e0.abs().max(f64::MIN_POSITIVE));
                outer = outer.max(solver.outer_fraction(&a));
            }
            if outer > ALIASING_THRESHOLD {
                notes.push(format!("aliasing guard: outer-band fraction {outer:.2e}"));
            }
            full = Some(states);
            mass_drift = Some(md);
            energy_drift = Some(ed);
            max_outer = Some(outer);
        }
    }
    let err_full = full.as_ref().map(|s| s.iter().zip(&targets).map(|(a, g)| dist(a, g)).collect());
    let full_vs_resonant = match (&full, &resonant) {
        (Some(f), Some(r)) => Some(f.iter().zip(r).map(|(a, b)| dist(a, b)).collect()),
        _ => None,
    };
    Ok(ApproxReport {
        l: cfg.l,
        eps: cfg.eps,
        sign: cfg.sign,
        t_star,
        horizon: run.horizon,
        gamma: run.gamma,
        sigma: run.sigma,
        cutoff: run.cutoff,
        bound_b,
        in_regime,
        trace_tail,
        tau: taus,
        t,
        err_free,
        err_resonant,
        err_full,
        full_vs_resonant,
        mass_drift,
        energy_drift,
        max_outer_fraction: max_outer,
        nls_steps: steps_needed,
        notes,
    })
}

/// `sup ⟨K⟩^σ |g₀(K)|` over lattice points in the annulus between the cutoff
/// and 1.5 times the cutoff.
fn trace_tail(g0: &GridField, params: &LatticeParams) -> f64 {
    let wide = LatticeParams { cutoff: params.cutoff * 1.5, ..*params };
    wide.ball()
        .into_iter()
        .filter(|&k| !params.contains(k))
        .map(|k| {
            let p = wide.point(k);
            (1.0 + p[0] * p[0] + p[1] * p[1]).powf(params.sigma / 2.0) * g0.eval(p).norm()
        })
        .fold(0.0, f64::max)
}

/// The same experiment posed on the unit torus `T²` (`H^s`-scale
/// normalisation `v̂₀(k) = N^{−1−s} g₀(k/N)`).
#[derive(Clone, Debug)]
pub struct TorusSetup {
    /// Refinement `N`.
    pub n: u32,
    /// Sobolev exponent `s > 1`.
    pub s: f64,
    /// `T_N = ζ(2)N^{2s}/(2 log N)`.
    pub t_n: f64,
    /// Unit-torus configuration (`L = 1`, `ε = 1`).
    pub cfg: NlsConfig,
    /// `v̂₀` on `Z²` (cutoff `N·R`).
    pub datum: LatticeField,
    /// `‖v₀‖_{H^s} = (Σ (1+|k|²)^s |v̂₀(k)|²)^{1/2}`.
    pub hs_norm: f64,
}

impl TorusSetup {
    /// The equivalent box problem on `T²_N` with `ε = N^{−s}` and data
    /// `g₀(K)`; its time runs `N²` times faster (`t_box = N² t`).
    pub fn box_equivalent(&self, g0: &GridField) -> Result<(NlsConfig, LatticeField)> {
        let n = self.n as f64;
        let cfg = NlsConfig { l: self.n, eps: n.powf(-self.s), dt: self.cfg.dt * n * n, ..self.cfg };
        let params = LatticeParams::new(self.n, self.datum.params().cutoff / n, self.datum.params().sigma)?;
        Ok((cfg, LatticeField::from_fn(params, |p| g0.eval(p))))
    }

    /// Predicted coefficients `e^{4π²i|k|²t} N^{−1−s} g(t/T_N, k/N)` for the
    /// continuous solution `g(τ, ξ)`.
    pub fn target(&self, g: impl Fn(f64, [f64; 2]) -> C64, t: f64) -> LatticeField {
        let n = self.n as f64;
        let amp = n.powf(-1.0 - self.s);
        self.datum.map(|k, _| {
            let ph = C64::from_polar(1.0, 4.0 * PI * PI * (k[0] * k[0] + k[1] * k[1]) * t);
            ph * amp * g(t / self.t_n, [k[0] / n, k[1] / n])
        })
    }
}

/// `T_N = ζ(2)N^{2s}/(2 log N)`.
pub fn torus_time(n: u32, s: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter("N must be at least 2".into()));
    }
    let nf = n as f64;
    Ok(ZETA2 * nf.powf(2.0 * s) / (2.0 * nf.ln()))
}

/// Rescales a box experiment to the unit torus: data `N^{−1−s}g₀(k/N)` for
/// `|k| ≤ N·cutoff`, NLS with `L = 1`, `ε = 1`. Requires `s > 1`.
pub fn unit_torus_rescale(g0: &GridField, n: u32, s: f64, sign: Sign, cutoff: f64, dt: f64) -> Result<TorusSetup> {
    if !(s > 1.0) {
        return Err(Error::InvalidParameter(format!("the torus rescaling needs s > 1, got {s}")));
    }
    let t_n = torus_time(n, s)?;
    let nf = n as f64;
    let params = LatticeParams::new(1, cutoff * nf, s)?;
    let amp = nf.powf(-1.0 - s);
    let datum = LatticeField::from_fn(params, |k| g0.eval([k[0] / nf, k[1] / nf]) * amp);
    let hs_norm = datum
        .entries()
        .into_iter()
        .map(|(k, v)| (1.0 + (k[0] * k[0] + k[1] * k[1]) as f64).powf(s) * v.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let modes = (4 * params.radius() as usize + 4).next_power_of_two();
    let cfg = NlsConfig { l: 1, eps: 1.0, sign, modes, dt, padded: false };
    cfg.validate()?;
    Ok(TorusSetup { n, s, t_n, cfg, datum, hs_norm })
}

/// `(‖⟨ξ⟩^s g‖₂, ‖|ξ|^s g‖₂)` by grid quadrature over `g`'s nodes.
pub fn weighted_l2_norms(g: &GridField, s: f64) -> (f64, f64) {
    let (mut inh, mut hom) = (0.0, 0.0);
    for i in 0..g.n() {
        for j in 0..g.n() {
            let p = g.node(i, j);
            let r2 = p[0] * p[0] + p[1] * p[1];
            let v = g.at(i, j).norm_sqr();
            inh += (1.0 + r2).powf(s) * v;
            hom += r2.powf(s) * v;
        }
    }
    let h2 = g.h() * g.h();
    ((inh * h2).sqrt(), (hom * h2).sqrt())
}

/// How the torus solution is produced by [`phase_shift_probe`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PhaseMethod {
    /// Resonant system on `Z²` (the time-averaged dynamics), integrated in
    /// `τ = t/T_N` with RK4 steps of at most `dtau`.
    Resonant {
        /// RK4 step in `τ`.
        dtau: f64,
    },
    /// Split-step NLS on the unit torus with step `dt`.
    SplitStep {
        /// Time step.
        dt: f64,
    },
}

/// Outcome of [`phase_shift_probe`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhaseProbeReport {
    /// Refinement `N`.
    pub n: u32,
    /// Sobolev exponent.
    pub s: f64,
    /// `T_N`.
    pub t_n: f64,
    /// `±(π/2)/T_N`.
    pub predicted: f64,
    /// Least-squares slope of the accumulated phase.
    pub fitted: f64,
    /// `|fitted − predicted|/|predicted|`.
    pub relative_error: f64,
    /// Probe times.
    pub t: Vec<f64>,
    /// Unwrapped phase `arg⟨ṽ(0), ṽ(t)⟩` of the interaction profile.
    pub phase: Vec<f64>,
    /// Whether the cubic term was active.
    pub nonlinear: bool,
}

/// Measures the nonlinear phase of the Gaussian-data torus solution relative
/// to the free flow at `t = τ_i·T_N` and fits `C_N` (least squares through the
/// origin); compares with `(π/2)/T_N`.
pub fn phase_shift_probe(n: u32, s: f64, taus: &[f64], sign: Sign, cutoff: f64, method: PhaseMethod, nonlinear: bool) -> Result<PhaseProbeReport> {
    if taus.is_empty() || taus.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidInput("probe times must be positive".into()));
    }
    let t_n = torus_time(n, s)?;
    let g0 = GridField::from_closure(cutoff + 1.0, 16, |p| C64::new(cr_operator::gaussian(p), 0.0))?;
    let times: Vec<f64> = taus.iter().map(|tau| tau * t_n).collect();
    let overlaps: Vec<C64> = match method {
        PhaseMethod::Resonant { dtau } => {
            let params = LatticeParams::new(n, cutoff, s)?;
            let b0 = LatticeField::from_fn(params, |p| g0.eval(p));
            let c = if nonlinear { sign.value() } else { 0.0 };
            let tr = resonant_flow(&b0, c, taus, dtau)?;
            tr.states.iter().map(|b| b0.inner(b)).collect()
        }
        PhaseMethod::SplitStep { dt } => {
            let mut setup = unit_torus_rescale(&g0, n, s, sign, cutoff, dt)?;
            if !nonlinear {
                setup.cfg.eps = f64::MIN_POSITIVE;
            }
            let solver = NlsSolver::new(setup.cfg)?;
            let params = *setup.datum.params();
            let mut a = solver.to_spectral(&setup.datum)?;
            let mut now = 0.0;
            let mut out = Vec::new();
            for &target in &times {
                let steps = ((target - now) / dt).ceil() as usize;
                if steps > 0 {
                    let h = (target - now) / steps as f64;
                    for _ in 0..steps {
                        solver.step(&mut a, h);
                    }
                }
                now = target;
                out.push(setup.datum.inner(&interaction_profile(&solver.to_lattice(&a, params), now)));
            }
            out
        }
    };
    let mut phase = Vec::with_capacity(overlaps.len());
    let mut prev = 0.0;
    for z in overlaps {
        let mut p = z.arg();
        while p - prev > PI {
            p -= 2.0 * PI;
        }
        while p - prev < -PI {
            p += 2.0 * PI;
        }
        phase.push(p);
        prev = p;
    }
    let fitted = times.iter().zip(&phase).map(|(t, p)| t * p).sum::<f64>() / times.iter().map(|t| t * t).sum::<f64>();
    let predicted = sign.value() * (PI / 2.0) / t_n;
    Ok(PhaseProbeReport {
        n,
        s,
        t_n,
        predicted,
        fitted,
        relative_error: (fitted - predicted).abs() / predicted.abs(),
        t: times,
        phase,
        nonlinear,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(l: u32, eps: f64, modes: usize, dt: f64) -> NlsConfig {
        NlsConfig { l, eps, sign: Sign::Defocusing, modes, dt, padded: false }
    }

    fn gaussian_field() -> GridField {
        GridField::from_closure(8.0, 16, |p| C64::new(cr_operator::gaussian(p), 0.0)).unwrap()
    }

    #[test]
    fn t_star_formula() {
        let t = t_star(16, 1e-3).unwrap();
        let expect = ZETA2 * 256.0 / (2.0 * 1e-6 * 16f64.ln());
        assert!((t / expect - 1.0).abs() < 1e-14);
        assert!(t_star(1, 0.1).is_err());
        assert!(t_star(4, 0.0).is_err());
    }

    #[test]
    fn weak_nonlinearity_reduces_to_free_flow() {
        let params = LatticeParams::new(4, 2.0, 3.0).unwrap();
        let u0 = LatticeField::from_fn(params, |p| C64::new(cr_operator::gaussian(p), 0.3 * p[0]));
        let c = cfg(4, 1e-12, 32, 0.01);
        let tr = nls_evolve(&u0, &c, 0.37, 100).unwrap();
        let last = tr.states.last().unwrap();
        let free = wind_profile(&u0, 0.37);
        for (k, v) in last.entries() {
            assert!((v - free.get(k)).norm() < 1e-12, "{k:?}");
        }
    }

    #[test]
    fn plane_wave_matches_closed_form() {
        let params = LatticeParams::new(4, 1.0, 3.0).unwrap();
        let amp = C64::new(1.5, -0.5);
        let k = [2, 1];
        let u0 = LatticeField::from_index_fn(params, |q| if q == k { amp } else { C64::new(0.0, 0.0) });
        for sign in [Sign::Defocusing, Sign::Focusing] {
            let c = NlsConfig { sign, ..cfg(4, 0.7, 16, 0.013) };
            let t = 2.0;
            let tr = nls_evolve(&u0, &c, t, 1000).unwrap();
            let kk = params.point(k);
            let phase = 4.0 * PI * PI * (kk[0] * kk[0] + kk[1] * kk[1]) * t
                + sign.value() * 0.49 * amp.norm_sqr() / 256.0 * t;
            let expect = amp * C64::from_polar(1.0, phase);
            assert!((tr.states.last().unwrap().get(k) - expect).norm() < 1e-8);
        }
    }

    #[test]
    fn splitting_conserves_mass() {
        let params = LatticeParams::new(2, 3.0, 3.0).unwrap();
        let u0 = LatticeField::from_fn(params, |p| C64::new(2.0 * cr_operator::gaussian(p), p[1]));
        let c = cfg(2, 1.0, 32, 1e-3);
        let tr = nls_evolve(&u0, &c, 10.0, 10_000).unwrap();
        let m0 = tr.mass[0];
        assert!(tr.mass.iter().all(|m| (m - m0).abs() / m0 < 1e-10));
    }

    #[test]
    fn profile_round_trip_and_identity() {
        let params = LatticeParams::new(3, 2.0, 3.0).unwrap();
        let a = LatticeField::from_fn(params, |p| C64::new(p[0], 1.0 + p[1]));
        assert_eq!(interaction_profile(&a, 0.0), a);
        let back = wind_profile(&interaction_profile(&a, 0.77), 0.77);
        for (k, v) in a.entries() {
            assert!((back.get(k) - v).norm() < 1e-14);
        }
    }

    #[test]
    fn resonant_system_keeps_zero_and_mass() {
        let params = LatticeParams::new(3, 2.0, 3.0).unwrap();
        let c = cfg(3, 1.0, 16, 0.1);
        let z = LatticeField::zeros(params);
        let tr = rs_evolve(&z, &c, 0.5, 0.1, 1).unwrap();
        assert!(tr.states.iter().all(|s| s.sum_sq() == 0.0));
        let b0 = LatticeField::from_fn(params, |p| C64::new(cr_operator::gaussian(p), 0.2 * p[0]));
        let tr = rs_evolve(&b0, &c, 0.4, 0.01, 1).unwrap();
        let (m0, h0) = (tr.mass[0], tr.hamiltonian[0]);
        for (m, h) in tr.mass.iter().zip(&tr.hamiltonian) {
            assert!((m - m0).abs() / m0 < 1e-7, "{m} vs {m0}");
            assert!((h - h0).abs() / h0 < 1e-7, "{h} vs {h0}");
        }
    }

    #[test]
    fn gap_vanishes_for_zero_and_is_cubic() {
        let params = LatticeParams::new(8, 3.0, 3.0).unwrap();
        let quad = QuadratureSpec::coarse();
        let zero = GridField::from_closure(6.0, 16, |_| C64::new(0.0, 0.0)).unwrap();
        let pts = GapPoints::Indices(gap_probe_indices(&params).unwrap());
        assert_eq!(tl_vs_t_gap(&zero, &params, &quad, &pts).unwrap(), 0.0);
        let g = gaussian_field();
        let g2 = g.scaled(C64::new(2.0, 0.0));
        let a = tl_vs_t_gap(&g, &params, &quad, &pts).unwrap();
        let b = tl_vs_t_gap(&g2, &params, &quad, &pts).unwrap();
        assert!((b / a - 8.0).abs() < 1e-9, "{}", b / a);
    }

    #[test]
    fn probe_points_live_on_the_lattice() {
        let p = LatticeParams::new(16, 4.0, 3.0).unwrap();
        let v = gap_probe_indices(&p).unwrap();
        assert_eq!(v.len(), GAP_PROBES.len());
        assert!(v.contains(&[8, 0]));
        assert!(gap_probe_indices(&LatticeParams::new(3, 0.2, 3.0).unwrap()).is_ok());
    }

    #[test]
    fn torus_rescale_rejects_small_s_and_normalises() {
        let g = gaussian_field();
        assert!(unit_torus_rescale(&g, 16, 1.0, Sign::Defocusing, 4.0, 1e-3).is_err());
        let setup = unit_torus_rescale(&g, 16, 1.5, Sign::Defocusing, 5.0, 1e-3).unwrap();
        assert!((setup.datum.get([0, 0]).re - 16f64.powf(-2.5) / PI.sqrt()).abs() < 1e-15);
        assert!((setup.t_n - ZETA2 * 16f64.powi(3) / (2.0 * 16f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn torus_and_box_runs_coincide() {
        let g = gaussian_field();
        let n = 4;
        let setup = unit_torus_rescale(&g, n, 1.5, Sign::Defocusing, 2.0, 1e-4).unwrap();
        let (bcfg, a0) = setup.box_equivalent(&g).unwrap();
        let t = 0.02;
        let v = nls_evolve(&setup.datum, &setup.cfg, t, 1000).unwrap();
        let bcfg = NlsConfig { modes: setup.cfg.modes, ..bcfg };
        let u = nls_evolve(&a0, &bcfg, t * (n * n) as f64, 1000).unwrap();
        let c = bcfg.eps / n as f64;
        let (vl, ul) = (v.states.last().unwrap(), u.states.last().unwrap());
        for (k, a) in ul.entries() {
            let expect = a * c;
            assert!((vl.get(k) - expect).norm() < 1e-12 * (1.0 + expect.norm()), "{k:?}");
        }
    }

    #[test]
    fn free_flow_probe_has_no_phase() {
        let r = phase_shift_probe(4, 1.5, &[0.5, 1.0], Sign::Defocusing, 3.0, PhaseMethod::Resonant { dtau: 0.25 }, false)
            .unwrap();
        assert!(r.fitted.abs() < 1e-15);
        let r2 = phase_shift_probe(4, 1.5, &[0.5, 1.0], Sign::Defocusing, 3.0, PhaseMethod::Resonant { dtau: 0.25 }, true)
            .unwrap();
        assert!(r2.fitted > 0.0);
        // Doubling T_N halves the predicted shift.
        let t8 = torus_time(8, 1.5).unwrap();
        let t8b = torus_time(8, 1.5 + 0.5 * 2f64.ln() / 8f64.ln()).unwrap();
        assert!((t8b / t8 - 2.0).abs() < 1e-12);
    }
}
