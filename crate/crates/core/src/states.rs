//! Pure states, density matrices and the discrete Wigner function.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{ChordError, Result};
use crate::operator::{hermitian_eigenvalues, DenseOperator};
use crate::phasespace::TorusGeometry;

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;

/// Number of periodic images summed on each side when building coherent states.
pub const COHERENT_IMAGES: i64 = 3;

/// A unit-norm vector in the position basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Array1<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Array1<Complex64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(ChordError::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm; fails only for the zero vector.
    pub fn normalized(amplitudes: Array1<Complex64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(ChordError::NotNormalized(norm));
        }
        Ok(Self { amplitudes: amplitudes.mapv(|z| z / norm) })
    }

    /// Position eigenstate `|n⟩`.
    pub fn basis(geom: &TorusGeometry, n: usize) -> Self {
        let mut a = Array1::zeros(geom.n());
        a[n % geom.n()] = Complex64::new(1.0, 0.0);
        Self { amplitudes: a }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

fn l2_norm(v: &Array1<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Circular Gaussian packet centred at `(q0, p0)` in unit-torus coordinates,
/// periodized over `±COHERENT_IMAGES` copies.
pub fn coherent_state(geom: &TorusGeometry, q0: f64, p0: f64) -> StateVector {
    let n = geom.n() as f64;
    let pi = std::f64::consts::PI;
    let amps = Array1::from_shape_fn(geom.n(), |site| {
        let x = site as f64 / n;
        (-COHERENT_IMAGES..=COHERENT_IMAGES)
            .map(|m| {
                let shifted = x - q0 + m as f64;
                let envelope = (-pi * n * shifted * shifted).exp();
                Complex64::from_polar(envelope, 2.0 * pi * n * p0 * (x + m as f64))
            })
            .sum::<Complex64>()
    });
    StateVector::normalized(amps).expect("periodized Gaussian never vanishes")
}

/// Equal-weight, zero-relative-phase superposition of two coherent states.
pub fn cat_state(geom: &TorusGeometry, c1: (f64, f64), c2: (f64, f64)) -> StateVector {
    let a = coherent_state(geom, c1.0, c1.1);
    let b = coherent_state(geom, c2.0, c2.1);
    StateVector::normalized(&a.amplitudes + &b.amplitudes).expect("coherent states never cancel exactly")
}

/// A Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: DenseOperator,
}

impl DensityMatrix {
    pub fn new(op: DenseOperator) -> Result<Self> {
        let herm = op.hermiticity_residual();
        if herm > HERMITIAN_TOL {
            return Err(ChordError::NotHermitian(herm));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(ChordError::TraceNotOne(tr.re));
        }
        let min = hermitian_eigenvalues(&op)?.first().copied().unwrap_or(0.0);
        if min < -POSITIVITY_TOL {
            return Err(ChordError::NotPositive(min));
        }
        Ok(Self { op })
    }

    /// For outputs of completely positive, trace-preserving maps applied to a
    /// valid density matrix.
    pub(crate) fn from_channel_output(op: DenseOperator) -> Self {
        Self { op }
    }

    /// `I/N`.
    pub fn maximally_mixed(geom: &TorusGeometry) -> Self {
        let n = geom.n();
        Self { op: DenseOperator::identity(n).scale(Complex64::new(1.0 / n as f64, 0.0)) }
    }

    pub fn op(&self) -> &DenseOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.op.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eigenvalues(&self.op)?[0])
    }

    /// `a·self + (1 − a)·other` for `a ∈ [0, 1]`.
    pub fn mix(&self, other: &DensityMatrix, a: f64) -> Result<DensityMatrix> {
        let left = self.op.scale(Complex64::new(a, 0.0));
        let right = other.op.scale(Complex64::new(1.0 - a, 0.0));
        DensityMatrix::new(left.add(&right)?)
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn density_from_pure(psi: &StateVector) -> Result<DensityMatrix> {
    let norm = l2_norm(&psi.amplitudes);
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(ChordError::NotNormalized(norm));
    }
    let a = &psi.amplitudes;
    let op = DenseOperator::new(Array2::from_shape_fn((a.len(), a.len()), |(i, j)| a[i] * a[j].conj()))?;
    Ok(DensityMatrix { op })
}

/// Discrete Wigner function on the doubled `2N × 2N` grid.
///
/// Index `(j, k)` sits at the phase-space point `(j/2, k/2)` in lattice units,
/// i.e. `(j/2N, k/2N)` on the unit torus. Values are normalized so that the
/// whole grid sums to `Tr ρ`; for even `N` the integer-point subgrid (both
/// indices even) also sums to `Tr ρ`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    geometry: TorusGeometry,
    values: Array2<f64>,
    max_imag: f64,
}

impl WignerGrid {
    pub fn geometry(&self) -> &TorusGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.values[[j, k]]
    }

    /// Largest imaginary part discarded when the values were made real.
    pub fn max_imag(&self) -> f64 {
        self.max_imag
    }

    pub fn total(&self) -> f64 {
        self.values.sum()
    }

    /// Sum over the integer phase-space points (even `j`, even `k`).
    pub fn fundamental_sum(&self) -> f64 {
        self.values.slice(ndarray::s![..;2, ..;2]).sum()
    }

    /// `Tr(ρ₁ρ₂) = N Σ W₁ W₂` over the full doubled grid.
    pub fn overlap(&self, other: &WignerGrid) -> f64 {
        let n = self.geometry.n() as f64;
        n * self.values.iter().zip(other.values.iter()).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn argmax(&self) -> (usize, usize) {
        let mut best = ((0, 0), f64::NEG_INFINITY);
        for ((j, k), v) in self.values.indexed_iter() {
            if *v > best.1 {
                best = ((j, k), *v);
            }
        }
        best.0
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `W(j,k) = Tr(A_(j,k) ρ) / 2N` with phase-point operators
/// `A_(j,k) = Σ_m exp(−2πi k m/N + iπ j k/N) |j − m⟩⟨m|`, the Fourier
/// transform of the translations on the doubled grid.
pub fn wigner_function(rho: &DensityMatrix) -> WignerGrid {
    let n = rho.dim();
    let geom = TorusGeometry::new(n).expect("density matrices have dimension ≥ 2");
    let roots = geom.half_roots();
    let two_n = 2 * n;
    let op = rho.op();
    let norm = 1.0 / two_n as f64;

    let mut values = Array2::zeros((two_n, two_n));
    let mut max_imag = 0.0f64;
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut dft = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..two_n {
        for (m, slot) in line.iter_mut().enumerate() {
            *slot = op.get(m, (j + two_n - m) % n);
        }
        // The inner DFT is N-periodic in k.
        for (k, out) in dft.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, v) in line.iter().enumerate() {
                acc += v * roots[(two_n - (2 * k * m) % two_n) % two_n];
            }
            *out = acc;
        }
        for k in 0..two_n {
            let w = dft[k % n] * roots[(j * k) % two_n] * norm;
            max_imag = max_imag.max(w.im.abs());
            values[[j, k]] = w.re;
        }
    }
    WignerGrid { geometry: geom, values, max_imag }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(n: usize) -> TorusGeometry {
        TorusGeometry::new(n).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn coherent_state_symmetric_about_centre() {
        let g = geom(32);
        let psi = coherent_state(&g, 0.5, 0.0);
        let a = psi.amplitudes();
        assert!((l2_norm(a) - 1.0).abs() < 1e-14);
        for n in 0..32 {
            assert!(a[n].im.abs() < 1e-15);
            assert!(a[n].re > 0.0);
        }
        for d in 1..16 {
            assert!((a[16 + d] - a[16 - d]).norm() < 1e-15);
        }
    }

    #[test]
    fn coherent_state_peaks_at_centre() {
        let g = geom(32);
        let psi = coherent_state(&g, 0.4, 0.25);
        let (arg, _) = psi
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(i, z)| (i, z.norm()))
            .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        assert_eq!(arg, 13);
    }

    #[test]
    fn separated_packets_are_nearly_orthogonal() {
        let g = geom(64);
        let a = coherent_state(&g, 0.25, 0.5);
        let b = coherent_state(&g, 0.75, 0.5);
        assert!(a.inner(&b).norm() < 1e-6);
    }

    #[test]
    fn cat_of_identical_centres_is_coherent() {
        let g = geom(16);
        let cat = cat_state(&g, (0.3, 0.6), (0.3, 0.6));
        let coh = coherent_state(&g, 0.3, 0.6);
        assert!((cat.inner(&coh).norm() - 1.0).abs() < 1e-14);
        assert!((&cat.amplitudes - &coh.amplitudes).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn figure_cat_states_normalized() {
        for n in [32, 64] {
            let cat = cat_state(&geom(n), (0.4, 0.25), (0.6, 0.75));
            assert!((l2_norm(cat.amplitudes()) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pure_densities() {
        let g = geom(2);
        let rho = density_from_pure(&StateVector::basis(&g, 0)).unwrap();
        assert_eq!(rho.op().get(0, 0), c(1.0));
        assert_eq!(rho.op().get(1, 1), c(0.0));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::new(Array1::from(vec![c(h), c(h)])).unwrap();
        let rho = density_from_pure(&plus).unwrap();
        for z in rho.op().entries() {
            assert!((z - 0.5).norm() < 1e-15);
        }
        assert!((rho.purity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_unnormalized_states() {
        let err = StateVector::new(Array1::from(vec![c(1.0), c(1.0)])).unwrap_err();
        assert!(matches!(err, ChordError::NotNormalized(_)));
        assert!(StateVector::normalized(Array1::from(vec![c(0.0), c(0.0)])).is_err());
    }

    #[test]
    fn density_validation_errors() {
        let mut m = Array2::zeros((2, 2));
        m[[0, 1]] = c(1.0);
        m[[0, 0]] = c(1.0);
        assert!(matches!(DensityMatrix::new(DenseOperator::new(m).unwrap()), Err(ChordError::NotHermitian(_))));
        let m = DenseOperator::identity(2);
        assert!(matches!(DensityMatrix::new(m), Err(ChordError::TraceNotOne(_))));
        let m = DenseOperator::from_fn(2, |(i, j)| match (i, j) {
            (0, 0) => c(1.5),
            (1, 1) => c(-0.5),
            _ => c(0.0),
        })
        .unwrap();
        assert!(matches!(DensityMatrix::new(m), Err(ChordError::NotPositive(_))));
    }

    #[test]
    fn maximally_mixed_wigner_is_flat() {
        // even N: flat on the even-even subgrid, zero elsewhere
        let w = wigner_function(&DensityMatrix::maximally_mixed(&geom(8)));
        for ((j, k), v) in w.values().indexed_iter() {
            let expected = if j % 2 == 0 && k % 2 == 0 { 1.0 / 64.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-15, "({j}, {k}) = {v}");
        }
        assert!((w.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_wigner_peaks_at_centre() {
        let g = geom(32);
        let rho = density_from_pure(&coherent_state(&g, 0.4, 0.25)).unwrap();
        let w = wigner_function(&rho);
        // Ghost images on the doubled grid tie with the true peak.
        assert!(w.get(26, 16) >= w.max() - 1e-12);
        assert!(w.max_imag() < 1e-12);
        assert!((w.total() - 1.0).abs() < 1e-10);
        assert!((w.fundamental_sum() - 1.0).abs() < 1e-10);
    }
}
