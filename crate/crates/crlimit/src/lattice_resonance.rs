//! Discrete objects on the rescaled lattice `Z²_L = Z²/L`: visible points and
//! the Möbius function, enumeration of resonant rectangles and non-resonant
//! level sets, the normalised trilinear operator `T_L`, weighted sup norms and
//! the periodic Strichartz sum.
//!
//! Lattice points are addressed by their integer index `k ∈ Z²`, representing
//! the frequency `K = k/L`. All resonance tests are carried out on integer
//! indices, so `L²Ω` is computed exactly.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ζ(2) = π²/6`.
pub const ZETA2: f64 = PI * PI / 6.0;

/// Integer lattice index `k`, representing `K = k/L`.
pub type Idx = [i64; 2];

/// Box size, truncation radius and weight exponent of a lattice experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    /// Box size `L` (lattice spacing `1/L`); restricted to positive integers so
    /// that resonance tests stay exact.
    pub l: u32,
    /// Radius `R_max` in frequency units beyond which sequences vanish.
    pub cutoff: f64,
    /// Weight exponent `σ` of the `X^σ_L` norm.
    pub sigma: f64,
}

impl LatticeParams {
    /// Validated constructor.
    pub fn new(l: u32, cutoff: f64, sigma: f64) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidParameter("box size L must be positive".into()));
        }
        if !(cutoff > 0.0) || !cutoff.is_finite() {
            return Err(Error::InvalidParameter(format!("cutoff must be positive, got {cutoff}")));
        }
        Ok(LatticeParams { l, cutoff, sigma })
    }

    /// Squared index radius: `k` is stored iff `|k|² ≤ radius_sq`.
    pub fn radius_sq(&self) -> i64 {
        let r = self.cutoff * self.l as f64;
        (r * r + 1e-9).floor() as i64
    }

    /// Largest coordinate that can occur inside the ball.
    pub fn radius(&self) -> i64 {
        isqrt(self.radius_sq())
    }

    /// Whether index `k` lies inside the cutoff ball.
    pub fn contains(&self, k: Idx) -> bool {
        norm_sq(k) <= self.radius_sq()
    }

    /// The frequency `K = k/L`.
    pub fn point(&self, k: Idx) -> [f64; 2] {
        let l = self.l as f64;
        [k[0] as f64 / l, k[1] as f64 / l]
    }

    /// `ζ(2)/(2L² log L)`, the normalisation of `T_L`.
    pub fn t_l_normalization(&self) -> Result<f64> {
        if self.l <= 1 {
            return Err(Error::InvalidParameter(
                "T_L needs L > 1 (log L must be positive)".into(),
            ));
        }
        let l = self.l as f64;
        Ok(ZETA2 / (2.0 * l * l * l.ln()))
    }

    /// All indices of the cutoff ball in lexicographic order.
    pub fn ball(&self) -> Vec<Idx> {
        let m = self.radius();
        let r2 = self.radius_sq();
        let mut v = Vec::new();
        for x in -m..=m {
            for y in -m..=m {
                if x * x + y * y <= r2 {
                    v.push([x, y]);
                }
            }
        }
        v
    }
}

/// Complex sequence on the truncated lattice; indices outside the cutoff ball
/// are zero. Storage is a dense square covering the ball.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField {
    params: LatticeParams,
    radius: i64,
    side: usize,
    values: Vec<C64>,
}

impl LatticeField {
    /// The zero field.
    pub fn zeros(params: LatticeParams) -> Self {
        let radius = params.radius();
        let side = (2 * radius + 1) as usize;
        LatticeField { params, radius, side, values: vec![C64::new(0.0, 0.0); side * side] }
    }

    /// Samples `f(K)` at every `K = k/L` inside the ball.
    pub fn from_fn(params: LatticeParams, f: impl Fn([f64; 2]) -> C64) -> Self {
        let mut out = Self::zeros(params);
        for k in params.ball() {
            let i = out.slot(k).expect("ball index is stored");
            out.values[i] = f(params.point(k));
        }
        out
    }

    /// Builds a field from a function of the integer index.
    pub fn from_index_fn(params: LatticeParams, f: impl Fn(Idx) -> C64) -> Self {
        let mut out = Self::zeros(params);
        for k in params.ball() {
            let i = out.slot(k).expect("ball index is stored");
            out.values[i] = f(k);
        }
        out
    }

    /// Parameters of the field.
    pub fn params(&self) -> &LatticeParams {
        &self.params
    }

    #[inline]
    fn slot(&self, k: Idx) -> Option<usize> {
        let (x, y) = (k[0] + self.radius, k[1] + self.radius);
        let s = self.side as i64;
        if x < 0 || y < 0 || x >= s || y >= s {
            return None;
        }
        if norm_sq(k) > self.params.radius_sq() {
            return None;
        }
        Some((x * s + y) as usize)
    }

    /// Amplitude at `k` (zero outside the ball).
    #[inline]
    pub fn get(&self, k: Idx) -> C64 {
        match self.slot(k) {
            Some(i) => self.values[i],
            None => C64::new(0.0, 0.0),
        }
    }

    /// Sets the amplitude at `k`; indices outside the ball are rejected.
    pub fn set(&mut self, k: Idx, v: C64) -> Result<()> {
        match self.slot(k) {
            Some(i) => {
                self.values[i] = v;
                Ok(())
            }
            None => Err(Error::InvalidInput(format!("index {k:?} lies outside the cutoff ball"))),
        }
    }

    /// `(k, a_k)` for every index of the ball, lexicographically.
    pub fn entries(&self) -> Vec<(Idx, C64)> {
        self.params.ball().into_iter().map(|k| (k, self.get(k))).collect()
    }

    /// Raw dense storage (entries outside the ball are always zero).
    pub fn raw(&self) -> &[C64] {
        &self.values
    }

    /// Mutable raw storage. Callers must keep entries outside the ball at zero.
    pub fn raw_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    /// `Σ_K |a_K|²`.
    pub fn sum_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `Σ_K conj(a_K) b_K`.
    pub fn inner(&self, other: &LatticeField) -> C64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum()
    }

    /// Field multiplied by `c`.
    pub fn scaled(&self, c: C64) -> LatticeField {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// `self + c·other` (same parameters required).
    pub fn add_scaled(&self, other: &LatticeField, c: C64) -> LatticeField {
        assert_eq!(self.params, other.params, "fields live on different lattices");
        let mut out = self.clone();
        out.values.iter_mut().zip(&other.values).for_each(|(a, b)| *a += c * b);
        out
    }

    /// `self − other`.
    pub fn sub(&self, other: &LatticeField) -> LatticeField {
        self.add_scaled(other, C64::new(-1.0, 0.0))
    }

    /// Applies `f(K, a_K)` entrywise.
    pub fn map(&self, f: impl Fn([f64; 2], C64) -> C64) -> LatticeField {
        let mut out = self.clone();
        for k in self.params.ball() {
            let i = out.slot(k).expect("ball index is stored");
            out.values[i] = f(self.params.point(k), self.values[i]);
        }
        out
    }

    /// Whether the field is invariant under the eight lattice symmetries
    /// (exact floating-point equality).
    pub fn is_d4_symmetric(&self) -> bool {
        self.params.ball().into_iter().all(|k| {
            let v = self.get(k);
            d4_images(k).iter().all(|&q| self.get(q) == v)
        })
    }
}

/// The eight images of `k` under the symmetry group of the square lattice.
pub fn d4_images(k: Idx) -> [Idx; 8] {
    let [x, y] = k;
    [[x, y], [-x, y], [x, -y], [-x, -y], [y, x], [-y, x], [y, -x], [-y, -x]]
}

/// A resonant rectangle with vertex `K`, expressed by integer indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResonantTuple {
    /// Multiplier of the first leg (`0` for degenerate tuples).
    pub alpha: i64,
    /// Multiplier of the second leg (`0` for degenerate tuples).
    pub beta: i64,
    /// Visible direction `J` (`[0, 0]` for degenerate tuples).
    pub j: Idx,
    /// Vertex `K`.
    pub k: Idx,
    /// `K1 = K + N1`.
    pub k1: Idx,
    /// `K2 = K + N1 + N3`.
    pub k2: Idx,
    /// `K3 = K + N3`.
    pub k3: Idx,
}

impl ResonantTuple {
    /// Leg `N1 = K1 − K`.
    pub fn n1(&self) -> Idx {
        sub(self.k1, self.k)
    }

    /// Leg `N3 = K3 − K`.
    pub fn n3(&self) -> Idx {
        sub(self.k3, self.k)
    }

    /// `L²Ω = |k1|² − |k2|² + |k3|² − |k|²` in exact integer arithmetic.
    pub fn omega_scaled(&self) -> i64 {
        norm_sq(self.k1) - norm_sq(self.k2) + norm_sq(self.k3) - norm_sq(self.k)
    }

    /// Whether one of the legs vanishes.
    pub fn is_degenerate(&self) -> bool {
        self.n1() == [0, 0] || self.n3() == [0, 0]
    }
}

/// Resonance defect level `μ`, with its integer form `m = L²μ/2` when that
/// is an integer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSetKey {
    /// Real defect `μ`.
    pub mu: f64,
    /// `L²μ/2` when integral; `None` means the level set is empty.
    pub m: Option<i64>,
}

impl LevelSetKey {
    /// Key from a real defect. `μ` is a floating-point number, so integrality
    /// of `L²μ/2` is decided up to a relative `1e-9`.
    pub fn from_mu(mu: f64, l: u32) -> Self {
        let x = (l as f64).powi(2) * mu / 2.0;
        let r = x.round();
        let m = if x.is_finite() && (x - r).abs() <= 1e-9 * r.abs().max(1.0) { Some(r as i64) } else { None };
        LevelSetKey { mu, m }
    }

    /// Key from an exact integer level `m = L²μ/2`.
    pub fn from_m(m: i64, l: u32) -> Self {
        LevelSetKey { mu: 2.0 * m as f64 / (l as f64).powi(2), m: Some(m) }
    }
}

#[inline]
fn norm_sq(k: Idx) -> i64 {
    k[0] * k[0] + k[1] * k[1]
}

#[inline]
fn add(a: Idx, b: Idx) -> Idx {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
fn sub(a: Idx, b: Idx) -> Idx {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
fn perp(j: Idx) -> Idx {
    [-j[1], j[0]]
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended Euclid: `(g, u, v)` with `u·a + v·b = g = gcd(a, b) ≥ 0`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Integer `t` range with `|base + t·dir|² ≤ r2`, intersected with
/// `[t_min, +∞)`; returns `None` when empty.
fn line_range(base: Idx, dir: Idx, r2: i64, t_min: i64) -> Option<(i64, i64)> {
    let a = norm_sq(dir) as f64;
    let b = (base[0] * dir[0] + base[1] * dir[1]) as f64;
    let c = (norm_sq(base) - r2) as f64;
    let disc = b * b - a * c;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let inside = |t: i64| norm_sq(add(base, [t * dir[0], t * dir[1]])) <= r2;
    let mut lo = (((-b - s) / a).ceil() as i64).max(t_min);
    let mut hi = ((-b + s) / a).floor() as i64;
    // Repair rounding at both ends with exact tests (the admissible set is an
    // interval, so local moves suffice).
    while lo > t_min && inside(lo - 1) {
        lo -= 1;
    }
    while lo <= hi && !inside(lo) {
        lo += 1;
    }
    while inside(hi + 1) {
        hi += 1;
    }
    while hi >= lo && !inside(hi) {
        hi -= 1;
    }
    (lo <= hi).then_some((lo, hi))
}

/// Möbius function `μ(n)` by trial division.
pub fn mobius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(Error::InvalidInput("Möbius function is defined for n ≥ 1".into()));
    }
    let mut n = n;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return Ok(0);
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// `μ(0..=n)` by a linear sieve (`μ(0)` is stored as 0).
pub fn mobius_sieve(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    if n == 0 {
        mu[0] = 0;
        return mu;
    }
    mu[0] = 0;
    let mut is_comp = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !is_comp[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            if i * p > n {
                break;
            }
            is_comp[i * p] = true;
            if i % p == 0 {
                mu[i * p] = 0;
                break;
            }
            mu[i * p] = -mu[i];
        }
    }
    mu
}

/// Whether `(p, q)` is visible from the origin, i.e. `gcd(|p|, |q|) = 1`.
pub fn is_visible(p: i64, q: i64) -> Result<bool> {
    if p == 0 && q == 0 {
        return Err(Error::InvalidInput("the origin has no visibility".into()));
    }
    Ok(gcd(p, q) == 1)
}

/// Fraction of the nonzero points of `[−N, N]²` that are visible, computed
/// exactly by Möbius inversion over common divisors.
pub fn visible_density(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("visible_density needs N ≥ 1".into()));
    }
    let mu = mobius_sieve(n as usize);
    let mut visible: i128 = 0;
    for d in 1..=n {
        let m = mu[d as usize] as i128;
        if m != 0 {
            let s = 2 * (n / d) as i128 + 1;
            visible += m * (s * s - 1);
        }
    }
    let total = (2 * n as i128 + 1).pow(2) - 1;
    Ok(visible as f64 / total as f64)
}

/// Integer points `z` with `|z − center|² = radius_sq` inside `[−box_half, box_half]²`.
pub fn circle_lattice_count(center: Idx, radius_sq: i64, box_half: i64) -> Result<u64> {
    if radius_sq < 0 {
        return Err(Error::InvalidInput("radius_sq must be non-negative".into()));
    }
    let r = isqrt(radius_sq);
    let mut count = 0;
    for dx in -r..=r {
        let rest = radius_sq - dx * dx;
        let dy = isqrt(rest);
        if dy * dy != rest {
            continue;
        }
        let x = center[0] + dx;
        if x.abs() > box_half {
            continue;
        }
        let ys: &[i64] = if dy == 0 { &[0] } else { &[dy, -dy] };
        for &s in ys {
            if (center[1] + s).abs() <= box_half {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Visible directions `J` with `|J| ≤ radius`, in lexicographic order.
pub fn visible_directions(radius: i64) -> Vec<Idx> {
    let r2 = radius * radius;
    let mut v = Vec::new();
    for x in -radius..=radius {
        for y in -radius..=radius {
            if (x, y) != (0, 0) && x * x + y * y <= r2 && gcd(x, y) == 1 {
                v.push([x, y]);
            }
        }
    }
    v
}

/// Shared enumeration context: cutoff radius and the direction table.
#[derive(Clone, Debug)]
pub struct ResonantEnumerator {
    params: LatticeParams,
    r2: i64,
    dirs: Vec<Idx>,
}

impl ResonantEnumerator {
    /// Precomputes the visible directions reachable inside the ball.
    pub fn new(params: LatticeParams) -> Self {
        let dirs = visible_directions(2 * params.radius());
        ResonantEnumerator { params, r2: params.radius_sq(), dirs }
    }

    /// Parameters.
    pub fn params(&self) -> &LatticeParams {
        &self.params
    }

    /// Calls `visit(alpha, beta, J, K1, K3)` for every non-degenerate
    /// rectangle at `k` with `K1` and `K3` inside the ball. `N1 = αJ` with
    /// `α ≥ 1` and `J` visible; `N3 = βJ^⊥` with `β ≠ 0`.
    pub fn for_each_nondegenerate(&self, k: Idx, mut visit: impl FnMut(i64, i64, Idx, Idx, Idx)) {
        for &j in &self.dirs {
            let Some((a0, a1)) = line_range(k, j, self.r2, 1) else { continue };
            let jp = perp(j);
            let Some((b0, b1)) = line_range(k, jp, self.r2, i64::MIN / 4) else { continue };
            for a in a0..=a1 {
                let k1 = [k[0] + a * j[0], k[1] + a * j[1]];
                for b in b0..=b1 {
                    if b == 0 {
                        continue;
                    }
                    let k3 = [k[0] + b * jp[0], k[1] + b * jp[1]];
                    visit(a, b, j, k1, k3);
                }
            }
        }
    }

    /// Unnormalised resonant sum `Σ_{R(K)} e_{K1} conj(f_{K2}) g_{K3}` at `k`,
    /// degenerate tuples included.
    pub fn resonant_sum_at(&self, e: &LatticeField, f: &LatticeField, g: &LatticeField, k: Idx, sums: &DegenerateSums) -> C64 {
        let (ek, fk, gk) = (e.get(k), f.get(k), g.get(k));
        // N1 = 0: e_K Σ conj(f)g ; N3 = 0, N1 ≠ 0: g_K (Σ conj(f)e − conj(f_K)e_K).
        let mut acc = ek * sums.fg + gk * sums.fe - ek * fk.conj() * gk;
        let mut gbuf: Vec<C64> = Vec::new();
        for &j in &self.dirs {
            let Some((a0, a1)) = line_range(k, j, self.r2, 1) else { continue };
            let jp = perp(j);
            let Some((b0, b1)) = line_range(k, jp, self.r2, i64::MIN / 4) else { continue };
            gbuf.clear();
            gbuf.extend((b0..=b1).map(|b| g.get([k[0] + b * jp[0], k[1] + b * jp[1]])));
            for a in a0..=a1 {
                let k1 = [k[0] + a * j[0], k[1] + a * j[1]];
                let e1 = e.get(k1);
                if e1 == C64::new(0.0, 0.0) {
                    continue;
                }
                let mut inner = C64::new(0.0, 0.0);
                for (bi, b) in (b0..=b1).enumerate() {
                    if b == 0 {
                        continue;
                    }
                    let k2 = [k1[0] + b * jp[0], k1[1] + b * jp[1]];
                    inner += f.get(k2).conj() * gbuf[bi];
                }
                acc += e1 * inner;
            }
        }
        acc
    }
}

/// The two global sums entering the degenerate part of the resonant sum.
#[derive(Clone, Copy, Debug)]
pub struct DegenerateSums {
    /// `Σ_N conj(f_N) g_N`.
    pub fg: C64,
    /// `Σ_N conj(f_N) e_N`.
    pub fe: C64,
}

impl DegenerateSums {
    /// Computes both sums.
    pub fn new(e: &LatticeField, f: &LatticeField, g: &LatticeField) -> Self {
        DegenerateSums { fg: f.inner(g), fe: f.inner(e) }
    }
}

/// Every tuple of `R(K)` with `K`, `K1`, `K3` inside the cutoff ball (`K2` is
/// determined and unconstrained). Degenerate tuples (a vanishing leg) come
/// first, in lexicographic order of `(K1, K3)`; non-degenerate tuples follow,
/// ordered lexicographically by `(α, β, J)`, each rectangle exactly once.
pub fn enumerate_resonant(k: Idx, params: &LatticeParams, include_degenerate: bool) -> Result<Vec<ResonantTuple>> {
    if !params.contains(k) {
        return Err(Error::InvalidInput(format!("K index {k:?} exceeds the cutoff")));
    }
    let mut out = Vec::new();
    if include_degenerate {
        let mut deg = Vec::new();
        for p in params.ball() {
            // N1 = 0, K3 = p.
            deg.push(ResonantTuple { alpha: 0, beta: 0, j: [0, 0], k, k1: k, k2: p, k3: p });
            if p != k {
                // N3 = 0, K1 = p.
                deg.push(ResonantTuple { alpha: 0, beta: 0, j: [0, 0], k, k1: p, k2: p, k3: k });
            }
        }
        deg.sort_by_key(|t| (t.k1, t.k3));
        out.extend(deg);
    }
    let en = ResonantEnumerator::new(*params);
    let mut nd = Vec::new();
    en.for_each_nondegenerate(k, |alpha, beta, j, k1, k3| {
        nd.push(ResonantTuple { alpha, beta, j, k, k1, k2: [k1[0] + k3[0] - k[0], k1[1] + k3[1] - k[1]], k3 });
    });
    nd.sort_by_key(|t| (t.alpha, t.beta, t.j));
    out.extend(nd);
    Ok(out)
}

/// Tuples `(K1, K2, K3)` with `K1 − K2 + K3 = K` and `Ω = μ`, with `K1`, `K3`
/// inside the ball. Solves `n1·n3 = −m` (`m = L²μ/2`) as a linear Diophantine
/// equation in `n3` for each `n1`; empty when `m` is not an integer.
pub fn enumerate_level_set(k: Idx, key: LevelSetKey, params: &LatticeParams) -> Result<Vec<[Idx; 3]>> {
    if !params.contains(k) {
        return Err(Error::InvalidInput(format!("K index {k:?} exceeds the cutoff")));
    }
    let Some(m) = key.m else { return Ok(Vec::new()) };
    let r2 = params.radius_sq();
    let mut out = Vec::new();
    let ball = params.ball();
    for &k1 in &ball {
        let n1 = sub(k1, k);
        if n1 == [0, 0] {
            if m == 0 {
                out.extend(ball.iter().map(|&k3| [k1, k3, k3]));
            }
            continue;
        }
        let g = gcd(n1[0], n1[1]);
        if m % g != 0 {
            continue;
        }
        let j = [n1[0] / g, n1[1] / g];
        let c = -m / g;
        let (_, u, v) = ext_gcd(j[0], j[1]);
        let n3_0 = [c * u, c * v];
        let jp = perp(j);
        let base = add(k, n3_0);
        if let Some((t0, t1)) = line_range(base, jp, r2, i64::MIN / 4) {
            for t in t0..=t1 {
                let k3 = add(base, [t * jp[0], t * jp[1]]);
                out.push([k1, add(k1, sub(k3, k)), k3]);
            }
        }
    }
    Ok(out)
}

/// `T_L(e, f, g)` on the whole ball: `ζ(2)/(2L² log L) Σ_{R(K)} e_{K1}
/// conj(f_{K2}) g_{K3}`, degenerate tuples included.
pub fn t_l_apply(e: &LatticeField, f: &LatticeField, g: &LatticeField) -> Result<LatticeField> {
    let params = check_same(e, f, g)?;
    let norm = params.t_l_normalization()?;
    let en = ResonantEnumerator::new(params);
    let sums = DegenerateSums::new(e, f, g);
    let ball = params.ball();
    let vals: Vec<C64> = ball.par_iter().map(|&k| en.resonant_sum_at(e, f, g, k, &sums) * norm).collect();
    let mut out = LatticeField::zeros(params);
    for (k, v) in ball.into_iter().zip(vals) {
        out.set(k, v)?;
    }
    Ok(out)
}

/// `T_L(a, a, a)` for a field invariant under the lattice symmetry group:
/// only one representative per orbit is computed and the rest is filled by
/// symmetry, which is exact because `T_L` commutes with those symmetries.
pub fn t_l_cubic_symmetric(a: &LatticeField) -> Result<LatticeField> {
    let params = *a.params();
    let norm = params.t_l_normalization()?;
    let en = ResonantEnumerator::new(params);
    let sums = DegenerateSums::new(a, a, a);
    let reps: Vec<Idx> = params.ball().into_iter().filter(|k| 0 <= k[1] && k[1] <= k[0]).collect();
    let vals: Vec<C64> = reps.par_iter().map(|&k| en.resonant_sum_at(a, a, a, k, &sums) * norm).collect();
    let mut out = LatticeField::zeros(params);
    for (k, v) in reps.into_iter().zip(vals) {
        for q in d4_images(k) {
            out.set(q, v)?;
        }
    }
    Ok(out)
}

/// `T_L(e, f, g)` at selected indices only.
pub fn t_l_at(e: &LatticeField, f: &LatticeField, g: &LatticeField, ks: &[Idx]) -> Result<Vec<C64>> {
    let params = check_same(e, f, g)?;
    let norm = params.t_l_normalization()?;
    for &k in ks {
        if !params.contains(k) {
            return Err(Error::InvalidInput(format!("K index {k:?} exceeds the cutoff")));
        }
    }
    let en = ResonantEnumerator::new(params);
    let sums = DegenerateSums::new(e, f, g);
    Ok(ks.par_iter().map(|&k| en.resonant_sum_at(e, f, g, k, &sums) * norm).collect())
}

fn check_same(e: &LatticeField, f: &LatticeField, g: &LatticeField) -> Result<LatticeParams> {
    if e.params() != f.params() || f.params() != g.params() {
        return Err(Error::InvalidInput("fields must share lattice parameters".into()));
    }
    Ok(*e.params())
}

/// `sup_K ⟨K⟩^σ |a_K|` with `⟨K⟩ = (1 + |K|²)^{1/2}`.
pub fn x_sigma_norm_lattice(a: &LatticeField, sigma: f64) -> f64 {
    a.entries()
        .into_iter()
        .map(|(k, v)| {
            let p = a.params().point(k);
            (1.0 + p[0] * p[0] + p[1] * p[1]).powf(sigma / 2.0) * v.norm()
        })
        .fold(0.0, f64::max)
}

/// Periodic Strichartz sum `Σ_k Σ_{R(k)} φ̂(k1) conj φ̂(k2) φ̂(k3) conj φ̂(k)`
/// for data on `Z²` (`L = 1`) supported in `|k| ≤ 2N`.
///
/// The sum equals the time average of `∫_{T²}|e^{itΔ}φ|⁴` over one period
/// `(2π)^{-1}` of the free flow.
pub fn strichartz_sum(phi_hat: &LatticeField, n: u64) -> Result<f64> {
    let params = *phi_hat.params();
    if params.l != 1 {
        return Err(Error::InvalidInput("Strichartz sums use the unit lattice (L = 1)".into()));
    }
    let cap = (2 * n as i64).pow(2);
    for (k, v) in phi_hat.entries() {
        if v != C64::new(0.0, 0.0) && norm_sq(k) > cap {
            return Err(Error::InvalidInput(format!("φ̂ is supported outside |k| ≤ 2N at {k:?}")));
        }
    }
    let en = ResonantEnumerator::new(params);
    let sums = DegenerateSums::new(phi_hat, phi_hat, phi_hat);
    let ball = params.ball();
    let total: C64 = ball
        .par_iter()
        .map(|&k| phi_hat.get(k).conj() * en.resonant_sum_at(phi_hat, phi_hat, phi_hat, k, &sums))
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(total.re)
}

/// Trace of the mass-one Gaussian `G(ξ) = π^{-1/2} e^{-|ξ|²/2}` on the lattice.
pub fn gaussian_trace(params: LatticeParams) -> LatticeField {
    LatticeField::from_fn(params, |p| C64::new(crate::cr_operator::gaussian(p), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(l: u32, cutoff: f64) -> LatticeParams {
        LatticeParams::new(l, cutoff, 3.0).unwrap()
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(4).unwrap(), 0);
        assert_eq!(mobius(6).unwrap(), 1);
        assert_eq!(mobius(30).unwrap(), -1);
        assert!(mobius(0).is_err());
    }

    #[test]
    fn sieve_matches_trial_division() {
        let s = mobius_sieve(500);
        for n in 1..=500u64 {
            assert_eq!(s[n as usize], mobius(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn visibility_examples() {
        assert!(is_visible(1, 0).unwrap());
        assert!(!is_visible(2, 4).unwrap());
        assert!(is_visible(3, 5).unwrap());
        assert!(!is_visible(0, 2).unwrap());
        assert!(is_visible(0, -1).unwrap());
        assert!(is_visible(0, 0).is_err());
    }

    #[test]
    fn density_of_the_unit_box_is_one() {
        assert_eq!(visible_density(1).unwrap(), 1.0);
    }

    #[test]
    fn circle_counts() {
        assert_eq!(circle_lattice_count([0, 0], 25, 10).unwrap(), 12);
        assert_eq!(circle_lattice_count([0, 0], 3, 10).unwrap(), 0);
        assert_eq!(circle_lattice_count([0, 0], 0, 1).unwrap(), 1);
        assert_eq!(circle_lattice_count([5, 0], 0, 1).unwrap(), 0);
        assert_eq!(circle_lattice_count([0, 0], 25, 4).unwrap(), 8);
    }

    #[test]
    fn eight_unit_rectangles_at_the_origin() {
        let t = enumerate_resonant([0, 0], &p(1, 1.0), false).unwrap();
        assert_eq!(t.len(), 8);
        assert!(t.iter().all(|t| t.omega_scaled() == 0 && !t.is_degenerate()));
    }

    #[test]
    fn zero_rectangle_is_listed_when_degenerates_requested() {
        let t = enumerate_resonant([0, 0], &p(3, 1.0), true).unwrap();
        assert!(t.iter().any(|t| t.k1 == [0, 0] && t.k2 == [0, 0] && t.k3 == [0, 0]));
    }

    #[test]
    fn cutoff_violation_is_rejected() {
        assert!(enumerate_resonant([5, 0], &p(1, 2.0), true).is_err());
    }

    #[test]
    fn level_zero_equals_resonant_set() {
        let params = p(2, 1.5);
        for k in params.ball() {
            let mut a: Vec<[Idx; 3]> = enumerate_resonant(k, &params, true)
                .unwrap()
                .into_iter()
                .map(|t| [t.k1, t.k2, t.k3])
                .collect();
            let mut b = enumerate_level_set(k, LevelSetKey::from_mu(0.0, 2), &params).unwrap();
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn irrational_level_is_empty() {
        let key = LevelSetKey::from_mu(std::f64::consts::SQRT_2, 1);
        assert_eq!(key.m, None);
        assert!(enumerate_level_set([0, 0], key, &p(1, 3.0)).unwrap().is_empty());
    }

    #[test]
    fn x_sigma_examples() {
        let params = p(1, 2.0);
        assert_eq!(x_sigma_norm_lattice(&LatticeField::zeros(params), 3.0), 0.0);
        let mut a = LatticeField::zeros(params);
        a.set([0, 0], C64::new(2.0, 0.0)).unwrap();
        assert_eq!(x_sigma_norm_lattice(&a, 3.0), 2.0);
        let mut b = LatticeField::zeros(params);
        b.set([1, 0], C64::new(1.0, 0.0)).unwrap();
        assert!((x_sigma_norm_lattice(&b, 2.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_site_field() {
        let params = p(4, 2.0);
        let mut a = LatticeField::zeros(params);
        a.set([0, 0], C64::new(1.0, 0.0)).unwrap();
        let t = t_l_apply(&a, &a, &a).unwrap();
        let norm = params.t_l_normalization().unwrap();
        for (k, v) in t.entries() {
            let expect = if k == [0, 0] { norm } else { 0.0 };
            assert!((v - C64::new(expect, 0.0)).norm() < 1e-15, "{k:?}");
        }
    }

    #[test]
    fn t_l_requires_l_above_one() {
        let a = LatticeField::zeros(p(1, 2.0));
        assert!(t_l_apply(&a, &a, &a).is_err());
    }

    #[test]
    fn symmetric_evaluation_matches_full() {
        let params = p(3, 2.0);
        let g = gaussian_trace(params);
        assert!(g.is_d4_symmetric());
        let full = t_l_apply(&g, &g, &g).unwrap();
        let sym = t_l_cubic_symmetric(&g).unwrap();
        for (k, v) in full.entries() {
            assert!((v - sym.get(k)).norm() < 1e-13 * v.norm().max(1e-300), "{k:?}");
        }
    }

    #[test]
    fn single_mode_strichartz_sum_is_one() {
        let mut a = LatticeField::zeros(p(1, 2.0));
        a.set([0, 0], C64::new(1.0, 0.0)).unwrap();
        assert!((strichartz_sum(&a, 1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn strichartz_rejects_wide_support() {
        let mut a = LatticeField::zeros(p(1, 5.0));
        a.set([5, 0], C64::new(1.0, 0.0)).unwrap();
        assert!(strichartz_sum(&a, 2).is_err());
    }

    #[test]
    fn ext_gcd_identity() {
        for a in -12..12 {
            for b in -12..12 {
                if a == 0 && b == 0 {
                    continue;
                }
                let (g, u, v) = ext_gcd(a, b);
                assert_eq!(g, gcd(a, b));
                assert_eq!(u * a + v * b, g);
            }
        }
    }
}
