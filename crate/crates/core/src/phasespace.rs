//! Discrete toroidal phase space: geometry, Weyl–Heisenberg translations and
//! the chord transform.
//!
//! Labels live in `[0, N)` but the translation phases are `2N`-th roots of
//! unity. Every phase is therefore computed as `exp(iπk/N)` from an integer
//! `k` reduced mod `2N`, which keeps the group law exact up to rounding of a
//! single `sin_cos`.

use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ChordError, Result};
use crate::operator::DenseOperator;

/// Sign `s` in `T_α T_λ T_α† = exp(s·i(2π/N)·λ∧α) T_λ`.
///
/// Fixed by the matrix identity at N = 4 (see the `conjugation_sign_regression`
/// test); every spectrum in the crate is written in terms of this constant.
pub const WEDGE_SIGN: i64 = 1;

/// The `N × N` phase-space grid with periodic boundary conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusGeometry {
    n: usize,
}

/// A canonical grid point, `0 ≤ q, p < N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: usize,
    pub p: usize,
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.q, self.p)
    }
}

impl TorusGeometry {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(ChordError::DimensionTooSmall(n));
        }
        Ok(Self { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Effective Planck constant `1/(2πN)`.
    pub fn hbar_eff(&self) -> f64 {
        1.0 / (2.0 * std::f64::consts::PI * self.n as f64)
    }

    pub fn num_points(&self) -> usize {
        self.n * self.n
    }

    /// Reduces an integer to `[0, N)`.
    #[inline]
    pub fn reduce(&self, x: i64) -> usize {
        x.rem_euclid(self.n as i64) as usize
    }

    /// Canonical point for arbitrary integer labels.
    #[inline]
    pub fn point(&self, q: i64, p: i64) -> PhasePoint {
        PhasePoint { q: self.reduce(q), p: self.reduce(p) }
    }

    /// Row-major index `q·N + p`.
    #[inline]
    pub fn index(&self, pt: PhasePoint) -> usize {
        pt.q * self.n + pt.p
    }

    #[inline]
    pub fn from_index(&self, idx: usize) -> PhasePoint {
        PhasePoint { q: idx / self.n, p: idx % self.n }
    }

    /// All `N²` points in row-major order.
    pub fn points(&self) -> impl Iterator<Item = PhasePoint> + '_ {
        (0..self.num_points()).map(move |i| self.from_index(i))
    }

    /// Representative of `x` in `[-N/2, N/2)` (for odd N, `[-(N-1)/2, (N-1)/2]`).
    #[inline]
    pub fn centered(&self, x: usize) -> i64 {
        let n = self.n as i64;
        let x = x as i64 % n;
        if x >= n - n / 2 {
            x - n
        } else {
            x
        }
    }

    pub fn centered_point(&self, pt: PhasePoint) -> (i64, i64) {
        (self.centered(pt.q), self.centered(pt.p))
    }

    pub fn neg(&self, pt: PhasePoint) -> PhasePoint {
        self.point(-(pt.q as i64), -(pt.p as i64))
    }

    pub fn add(&self, a: PhasePoint, b: PhasePoint) -> PhasePoint {
        self.point((a.q + b.q) as i64, (a.p + b.p) as i64)
    }

    /// `exp(iπk/N)`, a `2N`-th root of unity.
    #[inline]
    pub fn half_root(&self, k: i64) -> Complex64 {
        let two_n = 2 * self.n as i64;
        let k = k.rem_euclid(two_n);
        let (s, c) = (std::f64::consts::PI * k as f64 / self.n as f64).sin_cos();
        Complex64::new(c, s)
    }

    /// Table of `exp(iπk/N)` for `k = 0..2N`.
    pub(crate) fn half_roots(&self) -> Vec<Complex64> {
        (0..2 * self.n as i64).map(|k| self.half_root(k)).collect()
    }

    /// Sign relating translations with unreduced labels to canonical ones:
    /// `T_(q,p) = sign · T_(q mod N, p mod N)` under the matrix formula for
    /// `T` applied verbatim to integer labels.
    pub fn label_reduction_sign(&self, q: i64, p: i64) -> f64 {
        let n = self.n as i64;
        let wraps_q = q.div_euclid(n);
        let wraps_p = p.div_euclid(n);
        let p_red = p.rem_euclid(n);
        if (wraps_p * q + wraps_q * p_red).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Wedge product `λ∧α = μp − νq` for `λ = (μ, ν)`, `α = (q, p)`.
#[inline]
pub fn wedge(lambda: PhasePoint, alpha: PhasePoint) -> i64 {
    lambda.q as i64 * alpha.p as i64 - lambda.p as i64 * alpha.q as i64
}

/// `T_(q,p)|n⟩ = exp[(2πi/N)·p·(n + q/2)] |n + q mod N⟩`.
pub fn translation_operator(geom: &TorusGeometry, alpha: PhasePoint) -> DenseOperator {
    let n = geom.n();
    let (q, p) = (alpha.q as i64, alpha.p as i64);
    let mut m = Array2::zeros((n, n));
    for col in 0..n {
        m[[(col + alpha.q) % n, col]] = geom.half_root(p * (2 * col as i64 + q));
    }
    DenseOperator::from_array(m)
}

/// Triangle phase `exp[(iπ/N)(p1 q2 − q1 p2)]` of the unreduced group law.
pub fn triangle_phase(geom: &TorusGeometry, a1: PhasePoint, a2: PhasePoint) -> Complex64 {
    geom.half_root(-wedge(a1, a2))
}

/// Phase `c` with `T_a1 T_a2 = c · T_((a1 + a2) mod N)` as an exact matrix
/// identity: the triangle phase times the label-reduction sign of the sum.
pub fn composition_phase(geom: &TorusGeometry, a1: PhasePoint, a2: PhasePoint) -> Complex64 {
    let q = (a1.q + a2.q) as i64;
    let p = (a1.p + a2.p) as i64;
    triangle_phase(geom, a1, a2) * geom.label_reduction_sign(q, p)
}

/// Eigenvalue of conjugation by `T_α` on `T_λ`:
/// `T_α T_λ T_α† = conjugation_phase(α, λ) · T_λ`.
pub fn conjugation_phase(geom: &TorusGeometry, alpha: PhasePoint, lambda: PhasePoint) -> Complex64 {
    geom.half_root(2 * WEDGE_SIGN * wedge(lambda, alpha))
}

pub use crate::operator::hs_inner;

/// Coefficients `a(α) = Tr(A T_α†)/√N` over the translation basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ChordSymbol {
    geometry: TorusGeometry,
    coeffs: Vec<Complex64>,
}

impl ChordSymbol {
    pub fn new(geometry: TorusGeometry, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != geometry.num_points() {
            return Err(ChordError::DimensionMismatch {
                expected: geometry.num_points(),
                found: coeffs.len(),
            });
        }
        Ok(Self { geometry, coeffs })
    }

    pub fn geometry(&self) -> &TorusGeometry {
        &self.geometry
    }

    pub fn get(&self, pt: PhasePoint) -> Complex64 {
        self.coeffs[self.geometry.index(pt)]
    }

    /// Coefficients in row-major point order.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// `Σ_α |a(α)|²`, equal to `Tr(A†A)`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }
}

pub fn chord_transform(a: &DenseOperator, geom: &TorusGeometry) -> Result<ChordSymbol> {
    let n = geom.n();
    if a.dim() != n {
        return Err(ChordError::DimensionMismatch { expected: n, found: a.dim() });
    }
    let roots = geom.half_roots();
    let two_n = 2 * n;
    let norm = 1.0 / (n as f64).sqrt();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n * n];
    // The q-th cyclic subdiagonal A[n+q, n] carries every T_(q, ·) component.
    let mut diag = vec![Complex64::new(0.0, 0.0); n];
    for q in 0..n {
        for (col, d) in diag.iter_mut().enumerate() {
            *d = a.get((col + q) % n, col);
        }
        for p in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, d) in diag.iter().enumerate() {
                let k = (p * (2 * col + q)) % two_n;
                acc += d * roots[k].conj();
            }
            coeffs[q * n + p] = acc * norm;
        }
    }
    ChordSymbol::new(*geom, coeffs)
}

/// `A = Σ_α a(α) T_α / √N`.
pub fn chord_inverse(s: &ChordSymbol) -> DenseOperator {
    let geom = s.geometry;
    let n = geom.n();
    let roots = geom.half_roots();
    let two_n = 2 * n;
    let norm = 1.0 / (n as f64).sqrt();
    let mut m = Array2::zeros((n, n));
    for q in 0..n {
        let row = &s.coeffs[q * n..(q + 1) * n];
        for col in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (p, c) in row.iter().enumerate() {
                let k = (p * (2 * col + q)) % two_n;
                acc += c * roots[k];
            }
            m[[(col + q) % n, col]] = acc * norm;
        }
    }
    DenseOperator::from_array(m)
}

/// `out(λ) = Σ_α table(α) · exp(sign · i(2π/N) · λ∧α)` over row-major tables.
///
/// Separable in the two coordinates, so it costs `O(N³)` rather than `O(N⁴)`.
pub fn symplectic_fourier(geom: &TorusGeometry, table: &[Complex64], sign: i64) -> Vec<Complex64> {
    let n = geom.n();
    assert_eq!(table.len(), n * n, "table must cover the whole grid");
    let roots = geom.half_roots();
    let two_n = 2 * n as i64;
    let root = |k: i64| roots[(2 * sign * k).rem_euclid(two_n) as usize];

    // partial[q][μ] = Σ_p t(q,p) e^{s·i2π μ p/N}
    let mut partial = vec![Complex64::new(0.0, 0.0); n * n];
    for q in 0..n {
        for mu in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..n {
                acc += table[q * n + p] * root((mu * p) as i64);
            }
            partial[q * n + mu] = acc;
        }
    }
    // out(μ,ν) = Σ_q partial[q][μ] e^{−s·i2π ν q/N}
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for mu in 0..n {
        for nu in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for q in 0..n {
                acc += partial[q * n + mu] * root(-((nu * q) as i64));
            }
            out[mu * n + nu] = acc;
        }
    }
    out
}
