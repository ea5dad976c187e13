//! Unitary quantum maps on the torus and their chord-basis supermatrices.

use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ChordError, Result};
use crate::operator::DenseOperator;
use crate::phasespace::{PhasePoint, TorusGeometry};

const UNITARY_TOL: f64 = 1e-12;

/// Integer matrix `[[a, b], [c, d]]` with unit determinant, acting on column
/// vectors `(q, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearMapSpec {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl LinearMapSpec {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a * d - b * c;
        if det != 1 {
            return Err(ChordError::NotUnimodular { a, b, c, d, det });
        }
        Ok(Self { a, b, c, d })
    }

    /// `[[1, 1], [1, 2]]`.
    pub fn arnold_cat() -> Self {
        Self { a: 1, b: 1, c: 1, d: 2 }
    }

    pub fn identity() -> Self {
        Self { a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn entries(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    /// `M·(q, p) mod N`.
    pub fn apply(&self, geom: &TorusGeometry, pt: PhasePoint) -> PhasePoint {
        let (q, p) = (pt.q as i64, pt.p as i64);
        geom.point(self.a * q + self.b * p, self.c * q + self.d * p)
    }
}

/// A unitary `N × N` operator.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMap {
    op: DenseOperator,
}

impl UnitaryMap {
    pub fn new(op: DenseOperator) -> Result<Self> {
        let residual = op.unitarity_residual();
        if residual > UNITARY_TOL {
            return Err(ChordError::NotUnitary(residual));
        }
        Ok(Self { op })
    }

    pub fn op(&self) -> &DenseOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &UnitaryMap) -> Result<UnitaryMap> {
        Ok(UnitaryMap { op: self.op.matmul(&other.op)? })
    }
}

/// Metaplectic quantization of a unimodular map, satisfying
/// `U T_α U† = phase · T_(Mα mod N)`.
///
/// For `|b| = 1` the propagator is the generating-function kernel
/// `⟨n'|U|n⟩ = exp[(iπ/Nb)(a n² − 2 n n' + d n'²)] / √N`, which is
/// N-periodic only when `aN` and `dN` are even. For `b = 0` the map is a shear
/// `exp(iπ c a n²/N)` composed with the parity `|n⟩ → |a n⟩`, requiring `cN`
/// even.
pub fn quantize_linear_map(geom: &TorusGeometry, m: LinearMapSpec) -> Result<UnitaryMap> {
    let n = geom.n();
    let ni = n as i64;
    let LinearMapSpec { a, b, c, d } = m;
    let op = match b {
        0 => {
            let shear = c * a;
            if (shear * ni).rem_euclid(2) != 0 {
                return Err(ChordError::Unquantizable {
                    n,
                    reason: format!("b = 0 requires c*N ≡ 0 (mod 2), got c*N = {}", c * ni),
                });
            }
            DenseOperator::from_fn(n, |(row, col)| {
                let target = (a * col as i64).rem_euclid(ni) as usize;
                if row == target {
                    let r = row as i64;
                    geom.half_root(shear * r * r)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })?
        }
        1 | -1 => {
            if (a * ni).rem_euclid(2) != 0 || (d * ni).rem_euclid(2) != 0 {
                return Err(ChordError::Unquantizable {
                    n,
                    reason: format!(
                        "kernel requires a*N ≡ d*N ≡ 0 (mod 2), got a*N = {}, d*N = {}",
                        a * ni,
                        d * ni
                    ),
                });
            }
            let norm = 1.0 / (n as f64).sqrt();
            DenseOperator::from_fn(n, |(out, inp)| {
                let (np, nn) = (out as i64, inp as i64);
                // 1/b = b for b = ±1
                let k = b * (a * nn * nn - 2 * nn * np + d * np * np);
                geom.half_root(k) * norm
            })?
        }
        _ => {
            return Err(ChordError::Unquantizable {
                n,
                reason: format!("generating-function kernel needs |b| ≤ 1, got b = {b}"),
            })
        }
    };
    UnitaryMap::new(op)
}

/// Position kick `exp[−i (kN/2π) cos(2πn/N)]`.
pub fn nonlinear_kick(geom: &TorusGeometry, k: f64) -> UnitaryMap {
    let n = geom.n();
    let nf = n as f64;
    let tau = 2.0 * std::f64::consts::PI;
    let strength = k * nf / tau;
    let mut m = Array2::zeros((n, n));
    for site in 0..n {
        let phase = -strength * (tau * site as f64 / nf).cos();
        m[[site, site]] = Complex64::from_polar(1.0, phase);
    }
    UnitaryMap { op: DenseOperator::from_array(m) }
}

/// Quantized Arnold cat followed by the kick: `U = U_cat · kick(k)`.
pub fn perturbed_cat(geom: &TorusGeometry, k: f64) -> Result<UnitaryMap> {
    quantize_linear_map(geom, LinearMapSpec::arnold_cat())?.compose(&nonlinear_kick(geom, k))
}

/// Block of the unitary-step supermatrix
/// `𝔘(λ', λ) = Tr[T_λ'† U T_λ U†] / N` for chosen row and column modes.
#[derive(Clone, Debug, PartialEq)]
pub struct ChordSuperMatrix {
    geometry: TorusGeometry,
    rows: Vec<PhasePoint>,
    cols: Vec<PhasePoint>,
    entries: Array2<Complex64>,
}

impl ChordSuperMatrix {
    pub fn geometry(&self) -> &TorusGeometry {
        &self.geometry
    }

    pub fn rows(&self) -> &[PhasePoint] {
        &self.rows
    }

    pub fn cols(&self) -> &[PhasePoint] {
        &self.cols
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<Complex64> {
        self.entries
    }

    /// Acts on a coefficient vector indexed like `cols`.
    pub fn apply(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        if coeffs.len() != self.cols.len() {
            return Err(ChordError::DimensionMismatch { expected: self.cols.len(), found: coeffs.len() });
        }
        Ok(self.entries.dot(&ndarray::ArrayView1::from(coeffs)).to_vec())
    }

    /// Product of two square supermatrices over the same modes.
    pub fn matmul(&self, other: &ChordSuperMatrix) -> Result<ChordSuperMatrix> {
        if self.cols != other.rows {
            return Err(ChordError::DimensionMismatch { expected: self.cols.len(), found: other.rows.len() });
        }
        Ok(ChordSuperMatrix {
            geometry: self.geometry,
            rows: self.rows.clone(),
            cols: other.cols.clone(),
            entries: self.entries.dot(&other.entries),
        })
    }

    /// Max-entry deviation of `𝔘†𝔘` from the identity.
    pub fn unitarity_residual(&self) -> f64 {
        DenseOperator::from_array(self.entries.clone()).unitarity_residual()
    }
}

/// Full `N² × N²` supermatrix over all modes in row-major point order.
pub fn chord_supermatrix(geom: &TorusGeometry, u: &UnitaryMap) -> Result<ChordSuperMatrix> {
    let modes: Vec<PhasePoint> = geom.points().collect();
    supermatrix_block(geom, u, &modes, &modes)
}

/// Only the requested rows and columns are computed: `O(N²·(#row q-offsets)
/// + N·#rows)` work per column, never the full `N⁴` table.
pub fn supermatrix_block(
    geom: &TorusGeometry,
    u: &UnitaryMap,
    rows: &[PhasePoint],
    cols: &[PhasePoint],
) -> Result<ChordSuperMatrix> {
    let n = geom.n();
    if u.dim() != n {
        return Err(ChordError::DimensionMismatch { expected: n, found: u.dim() });
    }
    let roots = geom.half_roots();
    let two_n = 2 * n;
    let uop = u.op().entries();
    let u_conj = uop.mapv(|z| z.conj());

    // Rows grouped by position offset: each group shares one cyclic diagonal of U T_λ U†.
    let mut by_offset: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (row_idx, pt) in rows.iter().enumerate() {
        by_offset.entry(pt.q).or_default().push((row_idx, pt.p));
    }
    let inv_n = 1.0 / n as f64;

    let columns: Vec<Vec<Complex64>> = cols
        .par_iter()
        .map(|lambda| {
            let (q, p) = (lambda.q, lambda.p);
            // B = U T_λ: B[i, m] = U[i, m + q] · exp(iπ p (2m + q)/N)
            let mut b = Array2::<Complex64>::zeros((n, n));
            for m in 0..n {
                let phase = roots[(p * (2 * m + q)) % two_n];
                let src = (m + q) % n;
                for i in 0..n {
                    b[[i, m]] = uop[[i, src]] * phase;
                }
            }
            let mut column = vec![Complex64::new(0.0, 0.0); rows.len()];
            let mut diag = vec![Complex64::new(0.0, 0.0); n];
            for (&offset, members) in &by_offset {
                // diag[s] = (B U†)[s + offset, s]
                for (s, slot) in diag.iter_mut().enumerate() {
                    let brow = b.row((s + offset) % n);
                    let urow = u_conj.row(s);
                    *slot = brow.iter().zip(urow.iter()).map(|(x, y)| x * y).sum();
                }
                for &(row_idx, pp) in members {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (s, v) in diag.iter().enumerate() {
                        acc += v * roots[(pp * (2 * s + offset)) % two_n].conj();
                    }
                    column[row_idx] = acc * inv_n;
                }
            }
            column
        })
        .collect();

    let mut entries = Array2::zeros((rows.len(), cols.len()));
    for (j, column) in columns.into_iter().enumerate() {
        for (i, v) in column.into_iter().enumerate() {
            entries[[i, j]] = v;
        }
    }
    Ok(ChordSuperMatrix { geometry: *geom, rows: rows.to_vec(), cols: cols.to_vec(), entries })
}
