//! The continuous trilinear operator
//! `T(f,g,h)(ξ) = ∫_{−1}^{1}∫_{R²} f(ξ+z) conj g(ξ+z+λz^⊥) h(ξ+λz^⊥) dz dλ`,
//! the Hamiltonian `H(f) = ¼ Re⟨T(f,f,f), f⟩` in three equivalent forms,
//! conserved quantities, the unitary Fourier transform, weighted sup norms
//! and the catalogue of explicit stationary profiles.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{self, HermiteEngine};
use crate::numerics::{fft_freq, gauss_legendre, Fft2};

/// Mass-one Gaussian `G(x) = π^{-1/2} e^{-|x|²/2}`.
pub fn gaussian(x: [f64; 2]) -> f64 {
    (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp() / PI.sqrt()
}

/// `⟨x⟩ = (1 + |x|²)^{1/2}`.
pub fn japanese(x: [f64; 2]) -> f64 {
    (1.0 + x[0] * x[0] + x[1] * x[1]).sqrt()
}

/// Counter-clockwise rotation by `π/2`.
#[inline]
pub fn perp(z: [f64; 2]) -> [f64; 2] {
    [-z[1], z[0]]
}

/// A closed-form evaluator of a field.
pub type Closure = Arc<dyn Fn([f64; 2]) -> C64 + Send + Sync>;

/// How a [`GridField`] is evaluated between nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interp {
    /// Keys bicubic interpolation of the node values.
    Bicubic,
    /// A closed-form evaluator reproducing the node values.
    AnalyticClosure,
}

/// Complex field sampled on the nodes `x_i = −B + i·h`, `h = 2B/n`, of the box
/// `[−B, B]²`; row-major in `(x₁, x₂)`. Off-grid evaluation vanishes outside
/// the box.
#[derive(Clone)]
pub struct GridField {
    box_half: f64,
    n: usize,
    values: Vec<C64>,
    interp: Interp,
    closure: Option<Closure>,
}

impl fmt::Debug for GridField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridField")
            .field("box_half", &self.box_half)
            .field("n", &self.n)
            .field("interp", &self.interp)
            .finish_non_exhaustive()
    }
}

fn check_geometry(box_half: f64, n: usize) -> Result<()> {
    if !(box_half > 0.0) || !box_half.is_finite() {
        return Err(Error::InvalidParameter(format!("box_half must be positive, got {box_half}")));
    }
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("grid size must be even and ≥ 4, got {n}")));
    }
    Ok(())
}

fn keys(t: f64) -> f64 {
    let t = t.abs();
    if t <= 1.0 {
        (1.5 * t - 2.5) * t * t + 1.0
    } else if t < 2.0 {
        ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0
    } else {
        0.0
    }
}

impl GridField {
    /// Field given by node values, interpolated bicubically.
    pub fn from_values(box_half: f64, n: usize, values: Vec<C64>) -> Result<Self> {
        check_geometry(box_half, n)?;
        if values.len() != n * n {
            return Err(Error::InvalidInput(format!("expected {} values, got {}", n * n, values.len())));
        }
        Ok(GridField { box_half, n, values, interp: Interp::Bicubic, closure: None })
    }

    /// Field carrying a closed-form evaluator; node values are sampled from it.
    pub fn from_closure(box_half: f64, n: usize, f: impl Fn([f64; 2]) -> C64 + Send + Sync + 'static) -> Result<Self> {
        Self::from_closure_arc(box_half, n, Arc::new(f))
    }

    fn from_closure_arc(box_half: f64, n: usize, f: Closure) -> Result<Self> {
        check_geometry(box_half, n)?;
        let h = 2.0 * box_half / n as f64;
        let values = (0..n * n)
            .into_par_iter()
            .map(|ij| f([-box_half + (ij / n) as f64 * h, -box_half + (ij % n) as f64 * h]))
            .collect();
        Ok(GridField { box_half, n, values, interp: Interp::AnalyticClosure, closure: Some(f) })
    }

    /// The zero field.
    pub fn zeros(box_half: f64, n: usize) -> Result<Self> {
        Self::from_values(box_half, n, vec![C64::new(0.0, 0.0); n * n])
    }

    /// Half-width `B` of the box.
    pub fn box_half(&self) -> f64 {
        self.box_half
    }

    /// Nodes per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Grid spacing `h = 2B/n`.
    pub fn h(&self) -> f64 {
        2.0 * self.box_half / self.n as f64
    }

    /// Coordinate of node index `i` along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.box_half + i as f64 * self.h()
    }

    /// Position of node `(i, j)`.
    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [self.coord(i), self.coord(j)]
    }

    /// Interpolation rule.
    pub fn interp(&self) -> Interp {
        self.interp
    }

    /// Node values, row-major.
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Value at node `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.n + j]
    }

    /// Whether a closed-form evaluator is attached.
    pub fn has_closure(&self) -> bool {
        self.closure.is_some()
    }

    /// Evaluates the field anywhere: through the closure when present,
    /// otherwise by bicubic interpolation (zero outside the box).
    pub fn eval(&self, p: [f64; 2]) -> C64 {
        match &self.closure {
            Some(f) => f(p),
            None => self.interpolate(p),
        }
    }

    /// Bicubic interpolation of the node values.
    pub fn interpolate(&self, p: [f64; 2]) -> C64 {
        let b = self.box_half;
        if !(p[0] >= -b && p[0] <= b && p[1] >= -b && p[1] <= b) {
            return C64::new(0.0, 0.0);
        }
        let h = self.h();
        let u = (p[0] + b) / h;
        let v = (p[1] + b) / h;
        let (i0, j0) = (u.floor() as isize, v.floor() as isize);
        let (tu, tv) = (u - i0 as f64, v - j0 as f64);
        let n = self.n as isize;
        let mut acc = C64::new(0.0, 0.0);
        for di in -1..=2isize {
            let i = i0 + di;
            if i < 0 || i >= n {
                continue;
            }
            let wu = keys(tu - di as f64);
            if wu == 0.0 {
                continue;
            }
            let row = &self.values[(i as usize) * self.n..];
            let mut r = C64::new(0.0, 0.0);
            for dj in -1..=2isize {
                let j = j0 + dj;
                if j < 0 || j >= n {
                    continue;
                }
                r += row[j as usize] * keys(tv - dj as f64);
            }
            acc += r * wu;
        }
        acc
    }

    /// Field obtained by composing an operation with this field's evaluator;
    /// the result carries the composed evaluator and keeps the geometry.
    pub fn derive(&self, op: impl Fn([f64; 2], &GridField) -> C64 + Send + Sync + 'static) -> GridField {
        let base = Arc::new(self.clone());
        let mut out = Self::from_closure_arc(self.box_half, self.n, Arc::new(move |p| op(p, &base)))
            .expect("geometry already validated");
        out.interp = self.interp;
        out
    }

    /// Same function resampled on another grid.
    pub fn resample(&self, box_half: f64, n: usize) -> Result<GridField> {
        let base = Arc::new(self.clone());
        let mut out = Self::from_closure_arc(box_half, n, Arc::new(move |p| base.eval(p)))?;
        out.interp = self.interp;
        Ok(out)
    }

    /// `c·f`.
    pub fn scaled(&self, c: C64) -> GridField {
        let mut out = self.derive(move |p, f| c * f.eval(p));
        out.values = self.values.iter().map(|v| c * v).collect();
        out
    }

    /// `e^{iθ} f`.
    pub fn phase_rotated(&self, theta: f64) -> GridField {
        self.scaled(C64::from_polar(1.0, theta))
    }

    /// `f(x − x₀)`.
    pub fn translated(&self, x0: [f64; 2]) -> GridField {
        self.derive(move |p, f| f.eval([p[0] - x0[0], p[1] - x0[1]]))
    }

    /// `e^{ix·ξ₀} f(x)`.
    pub fn modulated(&self, xi0: [f64; 2]) -> GridField {
        self.derive(move |p, f| C64::from_polar(1.0, p[0] * xi0[0] + p[1] * xi0[1]) * f.eval(p))
    }

    /// `e^{iτ|x|²} f(x)`.
    pub fn quadratic_modulated(&self, tau: f64) -> GridField {
        self.derive(move |p, f| C64::from_polar(1.0, tau * (p[0] * p[0] + p[1] * p[1])) * f.eval(p))
    }

    /// `f(R_{−θ}x)`, the field rotated by `θ`.
    pub fn rotated(&self, theta: f64) -> GridField {
        let (s, c) = theta.sin_cos();
        self.derive(move |p, f| f.eval([c * p[0] + s * p[1], -s * p[0] + c * p[1]]))
    }

    /// `μ f(μx)`, the mass-preserving dilation.
    pub fn dilated(&self, mu: f64) -> GridField {
        self.derive(move |p, f| mu * f.eval([mu * p[0], mu * p[1]]))
    }

    /// Pointwise sum (geometry of `self`).
    pub fn add(&self, other: &GridField) -> GridField {
        let o = other.clone();
        self.derive(move |p, f| f.eval(p) + o.eval(p))
    }

    /// Grid `L²` norm squared, `h² Σ |f|²`.
    pub fn mass(&self) -> f64 {
        let h = self.h();
        h * h * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// Grid inner product `h² Σ conj(f) g` (geometries must match).
    pub fn inner(&self, other: &GridField) -> Result<C64> {
        self.check_same(other)?;
        let h = self.h();
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum::<C64>() * (h * h))
    }

    /// Grid `L²` distance.
    pub fn l2_distance(&self, other: &GridField) -> Result<f64> {
        self.check_same(other)?;
        let h = self.h();
        Ok((h * h * self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>()).sqrt())
    }

    fn check_same(&self, other: &GridField) -> Result<()> {
        if self.n != other.n || (self.box_half - other.box_half).abs() > 1e-12 * self.box_half {
            return Err(Error::InvalidInput("fields do not share grid geometry".into()));
        }
        Ok(())
    }

    /// Writes a JSON header (`<stem>.json`) and the node values as CSV rows
    /// `i,j,re,im` (`<stem>.csv`).
    pub fn save(&self, stem: &Path) -> Result<()> {
        let header = GridHeader { box_half: self.box_half, n: self.n, interp: self.interp };
        std::fs::write(stem.with_extension("json"), serde_json::to_string_pretty(&header)?)?;
        let mut w = csv::Writer::from_path(stem.with_extension("csv"))?;
        w.write_record(["i", "j", "re", "im"])?;
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.at(i, j);
                w.write_record([i.to_string(), j.to_string(), format!("{:.17e}", v.re), format!("{:.17e}", v.im)])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a field written by [`GridField::save`]; the result interpolates
    /// bicubically.
    pub fn load(stem: &Path) -> Result<Self> {
        let header: GridHeader = serde_json::from_str(&std::fs::read_to_string(stem.with_extension("json"))?)?;
        let n = header.n;
        let mut values = vec![C64::new(0.0, 0.0); n * n];
        let mut r = csv::Reader::from_path(stem.with_extension("csv"))?;
        for rec in r.records() {
            let rec = rec?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k)
                    .ok_or_else(|| Error::InvalidInput("short CSV row".into()))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidInput(format!("bad number in field CSV: {e}")))
            };
            let (i, j) = (parse(0)? as usize, parse(1)? as usize);
            if i >= n || j >= n {
                return Err(Error::InvalidInput(format!("node ({i},{j}) outside a {n}×{n} grid")));
            }
            values[i * n + j] = C64::new(parse(2)?, parse(3)?);
        }
        Self::from_values(header.box_half, n, values)
    }
}

/// JSON header of a serialised [`GridField`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GridHeader {
    /// Half-width of the box.
    pub box_half: f64,
    /// Nodes per axis.
    pub n: usize,
    /// Interpolation tag.
    pub interp: Interp,
}

/// Tensor Gauss–Legendre rule for the `(z, λ)` integral defining `T`: the
/// `z`-integral runs over the square `[−R, R]²`, `λ` over `[−1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Half-width `R` of the `z`-square.
    pub z_radius: f64,
    /// Gauss nodes per `z` axis.
    pub z_nodes: usize,
    /// Gauss nodes in `λ` (symmetric about 0).
    pub lambda_nodes: usize,
}

impl Default for QuadratureSpec {
    /// The refined default rule.
    fn default() -> Self {
        QuadratureSpec { z_radius: 9.0, z_nodes: 72, lambda_nodes: 20 }
    }
}

impl QuadratureSpec {
    /// A cheap rule, accurate to about one percent on unit-scale data.
    pub fn coarse() -> Self {
        QuadratureSpec { z_radius: 6.0, z_nodes: 16, lambda_nodes: 6 }
    }

    /// Checks the invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.z_radius > 0.0) || self.z_nodes < 2 || self.lambda_nodes < 2 {
            return Err(Error::InvalidParameter(format!("invalid quadrature spec {self:?}")));
        }
        Ok(())
    }

    fn rules(&self) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
        let (zx, zw) = gauss_legendre(self.z_nodes, -self.z_radius, self.z_radius);
        let (lx, lw) = gauss_legendre(self.lambda_nodes, -1.0, 1.0);
        (zx.into_iter().zip(zw).collect(), lx.into_iter().zip(lw).collect())
    }
}

fn t_point(f: &GridField, g: &GridField, h: &GridField, xi: [f64; 2], z: &[(f64, f64)], lam: &[(f64, f64)]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &(z1, w1) in z {
        for &(z2, w2) in z {
            let a = f.eval([xi[0] + z1, xi[1] + z2]);
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            let zp = [-z2, z1];
            let mut inner = C64::new(0.0, 0.0);
            for &(l, wl) in lam {
                let q = [xi[0] + l * zp[0], xi[1] + l * zp[1]];
                let c = h.eval(q);
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let b = g.eval([q[0] + z1, q[1] + z2]);
                inner += b.conj() * c * wl;
            }
            acc += a * inner * (w1 * w2);
        }
    }
    acc
}

/// `T(f, g, h)(ξ)` by the tensor rule `quad`.
pub fn t_apply(f: &GridField, g: &GridField, h: &GridField, at: [f64; 2], quad: &QuadratureSpec) -> Result<C64> {
    quad.validate()?;
    let (z, lam) = quad.rules();
    Ok(t_point(f, g, h, at, &z, &lam))
}

/// `T(f, g, h)` at every node of `f`'s grid, returned as a bicubic field.
pub fn t_apply_field(f: &GridField, g: &GridField, h: &GridField, quad: &QuadratureSpec) -> Result<GridField> {
    quad.validate()?;
    f.check_same(g)?;
    f.check_same(h)?;
    let (z, lam) = quad.rules();
    let n = f.n;
    let values = (0..n * n).into_par_iter().map(|ij| t_point(f, g, h, f.node(ij / n, ij % n), &z, &lam)).collect();
    GridField::from_values(f.box_half, n, values)
}

/// `T(f, f, f)` at selected points.
pub fn t_apply_points(f: &GridField, points: &[[f64; 2]], quad: &QuadratureSpec) -> Result<Vec<C64>> {
    quad.validate()?;
    let (z, lam) = quad.rules();
    Ok(points.par_iter().map(|&p| t_point(f, f, f, p, &z, &lam)).collect())
}

/// Relative size below which a node of `f` is skipped in the outer integral
/// of the quadruple form (its contribution is below `1e-9` relative).
const NEGLIGIBLE: f64 = 1e-9;

/// `H(f) = ¼ Re⟨T(f,f,f), f⟩`, with `T` by the tensor rule at the grid nodes
/// and the outer integral by the grid sum.
pub fn hamiltonian_quadruple(f: &GridField, quad: &QuadratureSpec) -> Result<f64> {
    quad.validate()?;
    let (z, lam) = quad.rules();
    let n = f.n;
    let h = f.h();
    let fmax = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let s: f64 = (0..n * n)
        .into_par_iter()
        .map(|ij| {
            let v = f.values[ij];
            // Nodes where the field is negligible cannot contribute.
            if v.norm() <= NEGLIGIBLE * fmax {
                return 0.0;
            }
            (t_point(f, f, f, f.node(ij / n, ij % n), &z, &lam) * v.conj()).re
        })
        .sum();
    Ok(0.25 * h * h * s)
}

/// `H(f)` in the manifestly non-negative form
/// `(1/16) ∫_{S¹}∫∫ |∫ f(uω + sω^⊥) conj f(tω + sω^⊥) ds|² du dt dω`.
///
/// For every direction the field is sampled on the rotated copy of its own
/// grid; the inner integral is then a matrix product `A = h F Fᴴ`. Opposite
/// directions contribute equally, so the angles cover `[0, π)` (uniform rule,
/// spectrally accurate for periodic integrands) and the result is doubled.
pub fn hamiltonian_sphere_form(f: &GridField, angle_nodes: usize) -> Result<f64> {
    if angle_nodes == 0 {
        return Err(Error::InvalidParameter("need at least one angle node".into()));
    }
    let n = f.n;
    let h = f.h();
    let total: f64 = (0..angle_nodes)
        .into_par_iter()
        .map(|k| {
            let phi = PI * k as f64 / angle_nodes as f64;
            let (s, c) = phi.sin_cos();
            let (om, omp) = ([c, s], [-s, c]);
            let mut m = DMatrix::<C64>::zeros(n, n);
            for iu in 0..n {
                let u = f.coord(iu);
                for is in 0..n {
                    let sv = f.coord(is);
                    m[(iu, is)] = f.eval([u * om[0] + sv * omp[0], u * om[1] + sv * omp[1]]);
                }
            }
            let a = &m * m.adjoint();
            // ∫∫|A|² du dt with A = h·(F Fᴴ).
            h * h * h * h * a.iter().map(|v| v.norm_sqr()).sum::<f64>()
        })
        .sum();
    Ok(2.0 * (PI / angle_nodes as f64) * total / 16.0)
}

/// Fraction of the value above which the analytic tail of the Strichartz form
/// is flagged. At the default window `T = 4` the tail is about 8% of `H` and
/// accurate to `O(T^{-2})` of itself.
pub const TAIL_WARNING_FRACTION: f64 = 0.10;

/// Result of the space-time (Strichartz) evaluation of the Hamiltonian.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StrichartzHamiltonian {
    /// Estimate of `H(f)`, including the dispersive tail correction.
    pub value: f64,
    /// Tail correction `(π/2)·‖f‖₄⁴/(2T)` added for `|t| > T`.
    pub tail: f64,
    /// Whether the tail correction exceeds [`TAIL_WARNING_FRACTION`] of the
    /// value, i.e. the window is too short for the asymptotic tail to be
    /// trusted.
    pub tail_warning: bool,
}

/// `H(f) = (π/2) ∫_R ∫ |e^{itΔ} f̂|⁴ dx dt`.
///
/// `e^{itΔ} f̂` is the Fourier transform of `e^{-it|η|²} f(η)`, evaluated with
/// the grid transform on an `fft_n`-point resampling of `f`'s box; time runs
/// over `[−T, T]` with graded Gauss panels (`time_nodes` per side). For
/// `|t| > T` the dispersive asymptotics `‖e^{itΔ}φ‖₄⁴ ≈ ‖φ̂‖₄⁴/(4t²)` give the
/// tail `‖f‖₄⁴/(2T)`; its relative error is `O(T^{-2})`.
pub fn hamiltonian_strichartz_form(f: &GridField, time_window: f64, time_nodes: usize, fft_n: usize) -> Result<StrichartzHamiltonian> {
    if !(time_window > 0.0) || time_nodes < 2 {
        return Err(Error::InvalidParameter("time window and node count must be positive".into()));
    }
    let base = f.resample(f.box_half, fft_n)?;
    let fft = Fft2::new(fft_n);
    // Graded panels towards t = 0 where the integrand varies fastest.
    let panels = 4usize;
    let per = (time_nodes / panels).max(2);
    let mut tn = Vec::new();
    for p in 0..panels {
        let a = time_window * if p == 0 { 0.0 } else { 2f64.powi(p as i32 - panels as i32) };
        let b = time_window * 2f64.powi(p as i32 + 1 - panels as i32);
        let (x, w) = gauss_legendre(per, a, b);
        tn.extend(x.into_iter().zip(w));
    }
    // Spacing of the transformed grid, 2·(nπ/(2B))/n.
    let hx = PI / base.box_half;
    let l4 = |t: f64| -> f64 {
        let mut data: Vec<C64> = (0..fft_n * fft_n)
            .map(|ij| {
                let p = base.node(ij / fft_n, ij % fft_n);
                base.values[ij] * C64::from_polar(1.0, -t * (p[0] * p[0] + p[1] * p[1]))
            })
            .collect();
        let u = fourier_values(&mut data, fft_n, base.h(), &fft);
        u.iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>() * hx * hx
    };
    let integral: f64 = tn.par_iter().map(|&(t, w)| w * (l4(t) + l4(-t))).sum();
    let h = base.h();
    let f4: f64 = base.values.iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>() * h * h;
    let tail = (PI / 2.0) * f4 / (2.0 * time_window);
    let value = (PI / 2.0) * integral + tail;
    Ok(StrichartzHamiltonian { value, tail, tail_warning: tail > TAIL_WARNING_FRACTION * value.abs() })
}

/// Continuum-normalised transform of node values in place; returns the
/// output values (`(1/2π)∫e^{-ix·ξ}f(x)dx` on the dual grid).
fn fourier_values(data: &mut [C64], n: usize, h: f64, fft: &Fft2) -> Vec<C64> {
    let sign = |i: usize| if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] *= sign(i + j);
        }
    }
    fft.forward(data);
    let c = h * h / (2.0 * PI);
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] *= sign(i + j) * c;
        }
    }
    data.to_vec()
}

/// Unitary Fourier transform `f̂(ξ) = (2π)^{-1}∫ e^{-ix·ξ} f(x) dx` on the
/// grid. The output grid has `n` nodes and half-width `nπ/(2B)`; the box
/// `B = (nπ/2)^{1/2}` is self-dual.
pub fn fourier(f: &GridField) -> Result<GridField> {
    let n = f.n;
    let fft = Fft2::new(n);
    let mut data = f.values.clone();
    let out = fourier_values(&mut data, n, f.h(), &fft);
    GridField::from_values(n as f64 * PI / (2.0 * f.box_half), n, out)
}

/// Inverse of [`fourier`].
pub fn inverse_fourier(f: &GridField) -> Result<GridField> {
    // F^{-1} g = conj(F conj g)
    let n = f.n;
    let fft = Fft2::new(n);
    let mut data: Vec<C64> = f.values.iter().map(|v| v.conj()).collect();
    let out = fourier_values(&mut data, n, f.h(), &fft);
    GridField::from_values(n as f64 * PI / (2.0 * f.box_half), n, out.into_iter().map(|v| v.conj()).collect())
}

/// The self-dual box half-width for `n` nodes.
pub fn self_dual_box(n: usize) -> f64 {
    (n as f64 * PI / 2.0).sqrt()
}

/// `max_nodes ⟨x⟩^σ |f(x)|`.
pub fn x_sigma_norm(f: &GridField, sigma: f64) -> f64 {
    let n = f.n;
    (0..n * n).map(|ij| japanese(f.node(ij / n, ij % n)).powf(sigma) * f.values[ij].norm()).fold(0.0, f64::max)
}

/// The seven conserved functionals of the flow.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservedLedger {
    /// `∫|f|²`.
    pub mass: f64,
    /// `∫ξ|f̂|²`.
    pub momentum: [f64; 2],
    /// `∫x|f|²`.
    pub position: [f64; 2],
    /// `∫|x|²|f|²`.
    pub first_moment: f64,
    /// `∫|∇f|²`.
    pub kinetic: f64,
    /// `i∫(x × ∇)f · conj f`.
    pub angular: f64,
    /// `H(f)`.
    pub hamiltonian: f64,
}

impl ConservedLedger {
    /// Entries as a flat array `(mass, px, py, qx, qy, moment, kinetic, angular, H)`.
    pub fn as_array(&self) -> [f64; 9] {
        [
            self.mass,
            self.momentum[0],
            self.momentum[1],
            self.position[0],
            self.position[1],
            self.first_moment,
            self.kinetic,
            self.angular,
            self.hamiltonian,
        ]
    }

    /// Column names matching [`ConservedLedger::as_array`].
    pub const COLUMNS: [&'static str; 9] = ["mass", "px", "py", "qx", "qy", "moment", "kinetic", "angular", "H"];

    /// Builds a ledger from quadratic moments and a Hamiltonian value.
    pub fn from_moments(m: &hermite::Moments, hamiltonian: f64) -> Self {
        ConservedLedger {
            mass: m.mass,
            momentum: m.momentum,
            position: m.position,
            first_moment: m.first_moment,
            kinetic: m.kinetic,
            angular: m.angular,
            hamiltonian,
        }
    }

    /// Largest deviation of the seven functionals from `reference`, each
    /// measured relative to `max(|reference|, scale)`; vector entries count
    /// componentwise.
    pub fn max_relative_deviation(&self, reference: &ConservedLedger, scale: f64) -> f64 {
        self.as_array()
            .iter()
            .zip(reference.as_array())
            .map(|(a, b)| (a - b).abs() / b.abs().max(scale))
            .fold(0.0, f64::max)
    }
}

/// Spectral partial derivative along `axis` of the node values.
pub fn spectral_derivative(f: &GridField, axis: usize) -> Vec<C64> {
    let n = f.n;
    let fft = Fft2::new(n);
    let mut data = f.values.clone();
    fft.forward(&mut data);
    let dk = 2.0 * PI / (n as f64 * f.h());
    for i in 0..n {
        for j in 0..n {
            let idx = if axis == 0 { i } else { j };
            // The Nyquist mode has no symmetric partner; drop it.
            let k = if 2 * idx == n { 0.0 } else { fft_freq(idx, n) as f64 * dk };
            data[i * n + j] *= C64::new(0.0, k);
        }
    }
    fft.inverse(&mut data);
    let s = 1.0 / (n * n) as f64;
    data.iter_mut().for_each(|v| *v *= s);
    data
}

/// The seven conserved functionals by grid quadrature; gradients are spectral
/// and the Hamiltonian uses the non-negative sphere form.
pub fn conserved(f: &GridField, angle_nodes: usize) -> Result<ConservedLedger> {
    let n = f.n;
    let h2 = f.h() * f.h();
    let d1 = spectral_derivative(f, 0);
    let d2 = spectral_derivative(f, 1);
    let i = C64::new(0.0, 1.0);
    let mut led = ConservedLedger {
        mass: 0.0,
        momentum: [0.0; 2],
        position: [0.0; 2],
        first_moment: 0.0,
        kinetic: 0.0,
        angular: 0.0,
        hamiltonian: 0.0,
    };
    let mut ang = C64::new(0.0, 0.0);
    let mut mom = [C64::new(0.0, 0.0); 2];
    for ij in 0..n * n {
        let x = f.node(ij / n, ij % n);
        let v = f.values[ij];
        let m = v.norm_sqr();
        led.mass += m;
        led.position[0] += x[0] * m;
        led.position[1] += x[1] * m;
        led.first_moment += (x[0] * x[0] + x[1] * x[1]) * m;
        led.kinetic += d1[ij].norm_sqr() + d2[ij].norm_sqr();
        mom[0] += v.conj() * d1[ij];
        mom[1] += v.conj() * d2[ij];
        ang += v.conj() * (x[0] * d2[ij] - x[1] * d1[ij]);
    }
    led.mass *= h2;
    led.position = [led.position[0] * h2, led.position[1] * h2];
    led.first_moment *= h2;
    led.kinetic *= h2;
    led.momentum = [(-i * mom[0]).re * h2, (-i * mom[1]).re * h2];
    led.angular = (i * ang).re * h2;
    led.hamiltonian = hamiltonian_sphere_form(f, angle_nodes)?;
    Ok(led)
}

/// Explicit stationary profiles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// `π^{-1/2} e^{-|x|²/2}`.
    Gaussian,
    /// `(2/π)^{1/2} x₁ e^{-|x|²/2}`.
    HermiteE4,
    /// `π^{-1/2}(|x|² − 1) e^{-|x|²/2}`.
    HermiteE6Radial,
    /// `1/|x|`.
    InverseX,
}

impl Profile {
    /// Closed-form value.
    pub fn value(&self, x: [f64; 2]) -> f64 {
        let r2 = x[0] * x[0] + x[1] * x[1];
        match self {
            Profile::Gaussian => gaussian(x),
            Profile::HermiteE4 => (2.0 / PI).sqrt() * x[0] * (-r2 / 2.0).exp(),
            Profile::HermiteE6Radial => (r2 - 1.0) * (-r2 / 2.0).exp() / PI.sqrt(),
            Profile::InverseX => 1.0 / r2.sqrt(),
        }
    }

    /// Hermite coefficients (unit scale) of the profiles living in one
    /// eigenspace, with their level.
    pub fn hermite_state(&self) -> Option<(usize, Vec<C64>)> {
        let one = C64::new(1.0, 0.0);
        match self {
            Profile::Gaussian => Some((0, vec![one])),
            Profile::HermiteE4 => Some((1, vec![one, C64::new(0.0, 0.0)])),
            Profile::HermiteE6Radial => {
                let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                Some((2, vec![a, C64::new(0.0, 0.0), a]))
            }
            Profile::InverseX => None,
        }
    }

    /// All profiles.
    pub const ALL: [Profile; 4] = [Profile::Gaussian, Profile::HermiteE4, Profile::HermiteE6Radial, Profile::InverseX];
}

impl std::str::FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Profile::Gaussian),
            "e4" | "hermite-e4" => Ok(Profile::HermiteE4),
            "e6" | "hermite-e6-radial" => Ok(Profile::HermiteE6Radial),
            "inv-x" | "inverse-x" => Ok(Profile::InverseX),
            other => Err(Error::InvalidInput(format!("unknown profile '{other}'"))),
        }
    }
}

/// How a catalogue rate was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateSource {
    /// Exact Galerkin evaluation on the profile's eigenspace.
    HermiteGalerkin,
    /// Singular quadrature of `T(1/|x|,1/|x|,1/|x|)` at `ξ = (1,0)`.
    SingularQuadrature,
}

/// A stationary profile with its rotation rate `ω` (`T(φ,φ,φ) = ωφ`).
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    /// Profile name.
    pub profile: Profile,
    /// Sampled field with closed-form evaluator.
    pub field: GridField,
    /// Rotation rate.
    pub rate: f64,
    /// Provenance of the rate.
    pub rate_source: RateSource,
    /// For `1/|x|`: radius below which node values are capped.
    pub inner_radius: Option<f64>,
}

/// Builds a catalogue profile on the grid `(box_half, n)` and computes its
/// rotation rate.
pub fn catalog_solution(profile: Profile, box_half: f64, n: usize) -> Result<CatalogEntry> {
    match profile {
        Profile::InverseX => {
            let mut field = GridField::from_closure(box_half, n, move |x| C64::new(Profile::InverseX.value(x), 0.0))?;
            let r0 = 2.0 * field.h();
            for (ij, v) in field.values.iter_mut().enumerate() {
                let x = [-box_half + (ij / n) as f64 * 2.0 * box_half / n as f64, -box_half + (ij % n) as f64 * 2.0 * box_half / n as f64];
                *v = C64::new(1.0 / japanese_radius(x).max(r0), 0.0);
            }
            let rate = inverse_x_ratio([1.0, 0.0], &SingularSpec::default())?;
            Ok(CatalogEntry { profile, field, rate, rate_source: RateSource::SingularQuadrature, inner_radius: Some(r0) })
        }
        _ => {
            let field = GridField::from_closure(box_half, n, move |x| C64::new(profile.value(x), 0.0))?;
            let (level, state) = profile.hermite_state().expect("eigenspace profile");
            let rate = eigenspace_rate(level, &state)?;
            Ok(CatalogEntry { profile, field, rate, rate_source: RateSource::HermiteGalerkin, inner_radius: None })
        }
    }
}

fn japanese_radius(x: [f64; 2]) -> f64 {
    (x[0] * x[0] + x[1] * x[1]).sqrt()
}

/// `⟨T(φ,φ,φ), φ⟩/‖φ‖²` for a state of the eigenspace of level `level`.
pub fn eigenspace_rate(level: usize, state: &[C64]) -> Result<f64> {
    if state.len() != level + 1 {
        return Err(Error::InvalidInput(format!("level {level} states have {} coefficients", level + 1)));
    }
    let eng = HermiteEngine::new(level + 1)?;
    let mut c = vec![C64::new(0.0, 0.0); eng.dim()];
    c[hermite::level_range(level)].copy_from_slice(state);
    let t = eng.cubic(&c);
    Ok(hermite::inner(&c, &t).re / hermite::mass(&c))
}

/// `T(G,G,G)(0)/G(0)` by the tensor rule; the exact value is `π/2`.
pub fn gaussian_omega0(quad: &QuadratureSpec) -> Result<f64> {
    let g = GridField::from_closure(8.0, 4, |x| C64::new(gaussian(x), 0.0))?;
    Ok(t_apply(&g, &g, &g, [0.0, 0.0], quad)?.re / gaussian([0.0, 0.0]))
}

/// Rule for `T(1/|x|,1/|x|,1/|x|)(ξ)`.
///
/// For fixed `λ` the integrand is singular at the three points where a factor
/// vanishes; a partition of unity `ψ_i ∝ |z − p_i|^{-12}` splits it into three
/// pieces, each integrated in polar coordinates centred at its singularity.
/// The radial rule is a Gauss panel on `[0, c]` (with `c` half the distance
/// to the nearest other singular point), geometrically growing panels up to
/// a far radius, and the substitution `r = R/s` beyond it. Two singular points
/// merge at `λ = 0`, producing a logarithmic singularity in `λ`, which is
/// resolved by geometrically graded `λ` panels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularSpec {
    /// Gauss nodes per radial panel.
    pub radial_nodes: usize,
    /// Uniform angle nodes.
    pub angle_nodes: usize,
    /// Graded `λ` panels per side.
    pub lambda_panels: usize,
    /// Gauss nodes per `λ` panel.
    pub lambda_nodes: usize,
}

impl Default for SingularSpec {
    fn default() -> Self {
        SingularSpec { radial_nodes: 12, angle_nodes: 96, lambda_panels: 44, lambda_nodes: 12 }
    }
}

impl SingularSpec {
    /// A cheaper rule for refinement studies.
    pub fn coarse() -> Self {
        SingularSpec { radial_nodes: 8, angle_nodes: 48, lambda_panels: 30, lambda_nodes: 8 }
    }
}


/// Power of the partition of unity; high enough that `ψ_i` kills the other
/// singularities to high order and the polar integrands stay smooth.
const PARTITION_POWER: i32 = 12;

/// Radial nodes and weights (including the `dr` Jacobian) for a polar
/// integral around a singular point, see [`SingularSpec`].
fn radial_rule(c: f64, far: f64, nodes: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(nodes, 0.0, 1.0);
    let mut out = Vec::new();
    let mut push_panel = |a: f64, b: f64| {
        for (xi, wi) in x.iter().zip(&w) {
            out.push((a + (b - a) * xi, (b - a) * wi));
        }
    };
    push_panel(0.0, c);
    let mut a = c;
    while a < far {
        let b = (2.0 * a).min(far);
        push_panel(a, b);
        a = b;
    }
    // r = far/s, dr = far/s² ds on s ∈ (0, 1].
    for (xi, wi) in x.iter().zip(&w) {
        out.push((far / xi, far / (xi * xi) * wi));
    }
    out
}

/// `T(1/|x|,1/|x|,1/|x|)(ξ)·|ξ|`, which is independent of `ξ ≠ 0`.
pub fn inverse_x_ratio(xi: [f64; 2], spec: &SingularSpec) -> Result<f64> {
    let r = japanese_radius(xi);
    if r == 0.0 {
        return Err(Error::InvalidInput("the ratio is taken at ξ ≠ 0".into()));
    }
    if spec.radial_nodes == 0 || spec.angle_nodes == 0 || spec.lambda_panels == 0 || spec.lambda_nodes == 0 {
        return Err(Error::InvalidParameter(format!("invalid singular rule {spec:?}")));
    }
    let inv = |p: [f64; 2]| 1.0 / japanese_radius(p);
    let mut lam = Vec::new();
    for p in 0..spec.lambda_panels {
        let a = if p == 0 { 0.0 } else { 2f64.powi(p as i32 - spec.lambda_panels as i32) };
        let b = 2f64.powi(p as i32 + 1 - spec.lambda_panels as i32);
        let (x, w) = gauss_legendre(spec.lambda_nodes, a, b);
        for (x, w) in x.into_iter().zip(w) {
            lam.push((x, w));
            lam.push((-x, w));
        }
    }
    let na = spec.angle_nodes;
    let total: f64 = lam
        .par_iter()
        .map(|&(l, wl)| {
            // Singular points: ξ+z = 0, ξ+z+λz^⊥ = 0, ξ+λz^⊥ = 0.
            let p1 = [-xi[0], -xi[1]];
            let d = 1.0 + l * l;
            let p2 = [-(xi[0] + l * xi[1]) / d, -(xi[1] - l * xi[0]) / d];
            let p3 = [xi[1] / l, -xi[0] / l];
            let pts = [p1, p2, p3];
            let integrand = |z: [f64; 2]| {
                let zp = perp(z);
                inv([xi[0] + z[0], xi[1] + z[1]])
                    * inv([xi[0] + z[0] + l * zp[0], xi[1] + z[1] + l * zp[1]])
                    * inv([xi[0] + l * zp[0], xi[1] + l * zp[1]])
            };
            let far = 64.0 * pts.iter().map(|q| japanese_radius(*q)).fold(r, f64::max);
            let mut acc = 0.0;
            for (i, &pi) in pts.iter().enumerate() {
                let dmin = pts
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, q)| japanese_radius([q[0] - pi[0], q[1] - pi[1]]))
                    .fold(f64::INFINITY, f64::min);
                let c = (0.5 * dmin).min(r);
                for (rad, wr) in radial_rule(c, far, spec.radial_nodes) {
                    for a in 0..na {
                        let th = 2.0 * PI * (a as f64 + 0.5) / na as f64;
                        let (st, ct) = th.sin_cos();
                        let z = [pi[0] + rad * ct, pi[1] + rad * st];
                        let wts = pts.map(|q| japanese_radius([z[0] - q[0], z[1] - q[1]]).powi(-PARTITION_POWER));
                        let sum: f64 = wts.iter().sum();
                        if !sum.is_finite() {
                            continue;
                        }
                        acc += wts[i] / sum * integrand(z) * rad * wr;
                    }
                }
            }
            acc * (2.0 * PI / na as f64) * wl
        })
        .sum();
    Ok(total * r)
}

/// A random smooth mass-one field: a sum of three modulated Gaussians with
/// complex amplitudes, centres in `[−1,1]²`, widths in `[0.7, 1.3]` and
/// modulations in `[−1,1]²`. Carries its closed form.
pub fn random_field(seed: u64, box_half: f64, n: usize) -> Result<GridField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps: Vec<(C64, [f64; 2], f64, [f64; 2])> = (0..3)
        .map(|_| {
            let amp = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let c = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let w = rng.gen_range(0.7..1.3);
            let k = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            (amp, c, w, k)
        })
        .collect();
    let eval = move |comps: &[(C64, [f64; 2], f64, [f64; 2])], x: [f64; 2]| -> C64 {
        comps
            .iter()
            .map(|(a, c, w, k)| {
                let d = [x[0] - c[0], x[1] - c[1]];
                a * (-(d[0] * d[0] + d[1] * d[1]) / (2.0 * w * w)).exp() * C64::from_polar(1.0, k[0] * x[0] + k[1] * x[1])
            })
            .sum()
    };
    // Mass of the closed form by a fine trapezoid sum (spectrally accurate).
    let (m_b, m_n) = (12.0, 256);
    let hm = 2.0 * m_b / m_n as f64;
    let mass: f64 = (0..m_n * m_n)
        .into_par_iter()
        .map(|ij| eval(&comps, [-m_b + (ij / m_n) as f64 * hm, -m_b + (ij % m_n) as f64 * hm]).norm_sqr())
        .sum::<f64>()
        * hm
        * hm;
    let s = 1.0 / mass.sqrt();
    GridField::from_closure(box_half, n, move |x| eval(&comps, x) * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g_field(b: f64, n: usize) -> GridField {
        GridField::from_closure(b, n, |x| C64::new(gaussian(x), 0.0)).unwrap()
    }

    #[test]
    fn geometry_is_validated() {
        assert!(GridField::zeros(1.0, 5).is_err());
        assert!(GridField::zeros(0.0, 8).is_err());
        assert!(GridField::from_values(1.0, 4, vec![C64::new(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn bicubic_reproduces_nodes_and_vanishes_outside() {
        let f = g_field(6.0, 32);
        let v = GridField::from_values(6.0, 32, f.values().to_vec()).unwrap();
        for (i, j) in [(3, 5), (16, 16), (20, 9)] {
            assert!((v.eval(v.node(i, j)) - f.at(i, j)).norm() < 1e-14);
        }
        assert_eq!(v.eval([7.0, 0.0]), C64::new(0.0, 0.0));
        assert!((v.eval([0.1, 0.2]) - f.eval([0.1, 0.2])).norm() < 2e-3);
    }

    #[test]
    fn zero_fields_give_zero() {
        let z = GridField::zeros(4.0, 8).unwrap();
        let q = QuadratureSpec::coarse();
        assert_eq!(t_apply(&z, &z, &z, [0.0, 0.0], &q).unwrap(), C64::new(0.0, 0.0));
        assert_eq!(hamiltonian_quadruple(&z, &q).unwrap(), 0.0);
        assert_eq!(hamiltonian_sphere_form(&z, 4).unwrap(), 0.0);
        assert_eq!(hamiltonian_strichartz_form(&z, 2.0, 8, 16).unwrap().value, 0.0);
        assert_eq!(x_sigma_norm(&z, 3.0), 0.0);
    }

    #[test]
    fn coarse_omega0_within_five_percent() {
        let w = gaussian_omega0(&QuadratureSpec::coarse()).unwrap();
        assert!((w / (PI / 2.0) - 1.0).abs() < 0.05, "{w}");
    }

    #[test]
    fn refined_omega0_within_a_thousandth() {
        let w = gaussian_omega0(&QuadratureSpec::default()).unwrap();
        assert!((w / (PI / 2.0) - 1.0).abs() < 1e-3, "{w}");
    }

    #[test]
    fn omega_scales_quadratically() {
        let q = QuadratureSpec::coarse();
        let g = g_field(8.0, 4);
        let g2 = g.scaled(C64::new(2.0, 0.0));
        let a = t_apply(&g, &g, &g, [0.0, 0.0], &q).unwrap();
        let b = t_apply(&g2, &g2, &g2, [0.0, 0.0], &q).unwrap();
        assert!((b / (2.0 * a) - C64::new(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn fourier_of_gaussian_is_gaussian() {
        let n = 64;
        let b = self_dual_box(n);
        let g = g_field(b, n);
        let gh = fourier(&g).unwrap();
        assert!((gh.box_half() - b).abs() < 1e-12);
        for (a, c) in g.values().iter().zip(gh.values()) {
            assert!((a - c).norm() < 1e-12);
        }
    }

    #[test]
    fn fourier_twice_is_parity() {
        let n = 64;
        let f = random_field(3, self_dual_box(n), n).unwrap();
        let ff = fourier(&fourier(&f).unwrap()).unwrap();
        for i in 1..n {
            for j in 1..n {
                assert!((ff.at(i, j) - f.at(n - i, n - j)).norm() < 1e-10);
            }
        }
        assert!((fourier(&f).unwrap().mass() - f.mass()).abs() < 1e-10);
        let back = inverse_fourier(&fourier(&f).unwrap()).unwrap();
        assert!(back.l2_distance(&f).unwrap() < 1e-12);
    }

    #[test]
    fn x_sigma_examples() {
        let mut v = vec![C64::new(0.0, 0.0); 64];
        v[4 * 8 + 4] = C64::new(3.0, 0.0);
        let f = GridField::from_values(4.0, 8, v).unwrap();
        assert_eq!(x_sigma_norm(&f, 3.0), 3.0);
    }

    #[test]
    fn gaussian_ledger() {
        let led = conserved(&g_field(8.0, 64), 32).unwrap();
        assert!((led.mass - 1.0).abs() < 1e-10);
        assert!((led.first_moment - 1.0).abs() < 1e-10);
        assert!((led.kinetic - 1.0).abs() < 1e-10);
        assert!(led.momentum.iter().chain(&led.position).all(|v| v.abs() < 1e-12));
        assert!(led.angular.abs() < 1e-12);
        assert!((led.hamiltonian - PI / 8.0).abs() < 1e-8, "{}", led.hamiltonian);
    }

    #[test]
    fn catalog_rates() {
        let g = catalog_solution(Profile::Gaussian, 6.0, 16).unwrap();
        assert!((g.rate - PI / 2.0).abs() < 1e-13);
        let e4 = catalog_solution(Profile::HermiteE4, 6.0, 16).unwrap();
        assert!(e4.rate > 0.0 && e4.rate < PI / 2.0);
        let e6 = catalog_solution(Profile::HermiteE6Radial, 6.0, 16).unwrap();
        assert!(e6.rate > 0.0 && e6.rate < PI / 2.0);
    }

    #[test]
    fn profile_names_parse() {
        assert_eq!("inv-x".parse::<Profile>().unwrap(), Profile::InverseX);
        assert!("nope".parse::<Profile>().is_err());
    }

    #[test]
    fn grid_field_round_trips_through_files() {
        let dir = std::env::temp_dir().join(format!("crlimit-grid-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let f = random_field(7, 4.0, 8).unwrap();
        let stem = dir.join("field");
        f.save(&stem).unwrap();
        let g = GridField::load(&stem).unwrap();
        assert_eq!(g.interp(), Interp::Bicubic);
        assert!(g.l2_distance(&f).unwrap() < 1e-15);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn sphere_form_is_quartic() {
        let f = random_field(11, 7.0, 48).unwrap();
        let a = hamiltonian_sphere_form(&f, 24).unwrap();
        let b = hamiltonian_sphere_form(&f.scaled(C64::new(2.0, 0.0)), 24).unwrap();
        assert!((b / a - 16.0).abs() < 1e-10);
    }
}
