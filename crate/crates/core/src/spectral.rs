//! Leading spectrum of the noisy propagator `𝔏 = diag(Σ) · 𝔘` in the chord
//! basis.
//!
//! Diffusive noise multiplies row `λ'` of the unitary-step supermatrix by a
//! Gaussian `Σ(λ')` of half-width `1/(2πσ)` chord units. Chords outside a
//! square window of side `2a/(2πσ)` are set exactly to zero, leaving a dense
//! eigenproblem of dimension about `4(a/(2πσ))²` instead of `N²`.

use ndarray::Array2;
use num_complex::Complex64;

use crate::channels::DiagonalChordChannel;
use crate::dynamics::{chord_supermatrix, supermatrix_block, UnitaryMap};
use crate::error::{ChordError, Result};
use crate::phasespace::{PhasePoint, TorusGeometry};

/// Largest N for which the untruncated `N² × N²` propagator may be built.
pub const FULL_PROPAGATOR_MAX_DIM: usize = 16;

/// Relative modulus gap below which eigenvalues count as tied and are ordered
/// by phase instead.
const MODULUS_TIE_TOL: f64 = 1e-10;

/// Reduced chord-basis propagator over the kept modes.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedPropagator {
    geometry: TorusGeometry,
    sigma: Option<f64>,
    a_coeff: Option<f64>,
    kept_modes: Vec<PhasePoint>,
    matrix: Array2<Complex64>,
    covers_all_modes: bool,
}

impl TruncatedPropagator {
    pub fn geometry(&self) -> &TorusGeometry {
        &self.geometry
    }

    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }

    pub fn a_coeff(&self) -> Option<f64> {
        self.a_coeff
    }

    pub fn kept_modes(&self) -> &[PhasePoint] {
        &self.kept_modes
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.kept_modes.len()
    }

    /// True when the window reached the whole grid and nothing was dropped.
    pub fn covers_all_modes(&self) -> bool {
        self.covers_all_modes
    }
}

/// Half-width `a/(2πσ)` of the truncation window in chord units.
pub fn window_half_width(sigma: f64, a_coeff: f64) -> f64 {
    a_coeff / (2.0 * std::f64::consts::PI * sigma)
}

/// Modes kept for noise width `sigma` and coefficient `a_coeff`.
///
/// The window spans `⌊2a/(2πσ)⌋` consecutive centred chord values on each axis
/// (capped at N), taken as `[−⌊c/2⌋, ⌈c/2⌉ − 1]` so that windows nest as `a`
/// grows and the full window is exactly the centred grid. Points are ordered
/// by centred `μ`, then centred `ν`.
pub fn kept_modes(geom: &TorusGeometry, sigma: f64, a_coeff: f64) -> Vec<PhasePoint> {
    let per_axis = per_axis_count(geom, sigma, a_coeff);
    let lo = -((per_axis / 2) as i64);
    let hi = per_axis.div_ceil(2) as i64 - 1;
    let mut modes = Vec::with_capacity(per_axis * per_axis);
    for mu in lo..=hi {
        for nu in lo..=hi {
            modes.push(geom.point(mu, nu));
        }
    }
    modes
}

fn per_axis_count(geom: &TorusGeometry, sigma: f64, a_coeff: f64) -> usize {
    let width = 2.0 * window_half_width(sigma, a_coeff);
    if width >= geom.n() as f64 {
        geom.n()
    } else {
        (width.floor() as usize).max(1)
    }
}

/// `𝔏(λ', λ) = Σ(λ')·𝔘(λ', λ)` restricted to the noise window of a Gaussian
/// channel. Only the kept block of `𝔘` is ever computed.
pub fn build_noisy_propagator(
    ch: &DiagonalChordChannel,
    u: &UnitaryMap,
    a_coeff: f64,
) -> Result<TruncatedPropagator> {
    let sigma = ch.sigma().ok_or(ChordError::NotGaussian)?;
    if !(a_coeff > 0.0 && a_coeff.is_finite()) {
        return Err(ChordError::InvalidTruncation(a_coeff));
    }
    let geom = *ch.geometry();
    let modes = kept_modes(&geom, sigma, a_coeff);
    let covers_all_modes = modes.len() == geom.num_points();
    let block = supermatrix_block(&geom, u, &modes, &modes)?;
    let matrix = scale_rows(block.into_entries(), ch, &modes);
    Ok(TruncatedPropagator {
        geometry: geom,
        sigma: Some(sigma),
        a_coeff: Some(a_coeff),
        kept_modes: modes,
        matrix,
        covers_all_modes,
    })
}

/// Untruncated propagator over all `N²` modes (row-major order) for any
/// diagonal channel. Limited to small N.
pub fn build_full_propagator(ch: &DiagonalChordChannel, u: &UnitaryMap) -> Result<TruncatedPropagator> {
    let geom = *ch.geometry();
    if geom.n() > FULL_PROPAGATOR_MAX_DIM {
        return Err(ChordError::ScaleGuard {
            n: geom.n(),
            max: FULL_PROPAGATOR_MAX_DIM,
            what: "untruncated propagator",
        });
    }
    let full = chord_supermatrix(&geom, u)?;
    let modes = full.rows().to_vec();
    let matrix = scale_rows(full.into_entries(), ch, &modes);
    Ok(TruncatedPropagator {
        geometry: geom,
        sigma: ch.sigma(),
        a_coeff: None,
        kept_modes: modes,
        matrix,
        covers_all_modes: true,
    })
}

fn scale_rows(mut m: Array2<Complex64>, ch: &DiagonalChordChannel, modes: &[PhasePoint]) -> Array2<Complex64> {
    let spectrum = ch.spectrum();
    for (mut row, mode) in m.rows_mut().into_iter().zip(modes) {
        let s = spectrum.get(*mode);
        row.mapv_inplace(|z| z * s);
    }
    m
}

/// Eigenvalues sorted by descending modulus.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<Complex64>,
    pub dim_used: usize,
}

impl SpectrumResult {
    pub fn leading(&self) -> Option<Complex64> {
        self.eigenvalues.first().copied()
    }

    pub fn max_modulus(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn phase_0_2pi(z: Complex64) -> f64 {
    let arg = z.arg();
    if arg < 0.0 { arg + std::f64::consts::TAU } else { arg }
}

/// Descending modulus; runs whose moduli agree within `MODULUS_TIE_TOL`
/// are ordered by ascending phase in `[0, 2π)`.
pub fn sort_eigenvalues(values: &mut [Complex64]) {
    values.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(phase_0_2pi(*a).total_cmp(&phase_0_2pi(*b))));
    let mut start = 0;
    while start < values.len() {
        let head = values[start].norm();
        let mut end = start + 1;
        while end < values.len() && head - values[end].norm() <= MODULUS_TIE_TOL * head.max(1.0) {
            end += 1;
        }
        values[start..end].sort_by(|a, b| phase_0_2pi(*a).total_cmp(&phase_0_2pi(*b)));
        start = end;
    }
}

/// All eigenvalues of a dense complex matrix, sorted by [`sort_eigenvalues`].
pub fn dense_eigenvalues(m: &Array2<Complex64>) -> Result<Vec<Complex64>> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(ChordError::NotSquare { rows, cols });
    }
    let mat = faer::Mat::<Complex64>::from_fn(rows, cols, |i, j| m[[i, j]]);
    let mut values = mat.eigenvalues().map_err(|e| ChordError::EigenSolver(format!("{e:?}")))?;
    if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(ChordError::EigenSolver("non-finite eigenvalue".into()));
    }
    sort_eigenvalues(&mut values);
    Ok(values)
}

/// The `count` largest-modulus eigenvalues of the truncated propagator.
pub fn leading_spectrum(tp: &TruncatedPropagator, count: usize) -> Result<SpectrumResult> {
    if count > tp.dim() {
        return Err(ChordError::CountTooLarge { count, available: tp.dim() });
    }
    let mut eigenvalues = dense_eigenvalues(&tp.matrix)?;
    eigenvalues.truncate(count);
    Ok(SpectrumResult { eigenvalues, dim_used: tp.dim() })
}

/// Pairs each of the top `count` eigenvalues of `s1`, in order, with the
/// nearest still-unpaired one among the top `count` of `s2`, and returns the
/// largest pair distance.
pub fn stability_report(s1: &SpectrumResult, s2: &SpectrumResult, count: usize) -> Result<f64> {
    pair_distance(&s1.eigenvalues, &s2.eigenvalues, count)
}

/// [`stability_report`] on raw eigenvalue lists sorted by descending modulus.
pub fn pair_distance(left: &[Complex64], right: &[Complex64], count: usize) -> Result<f64> {
    let available = left.len().min(right.len());
    if count > available {
        return Err(ChordError::CountTooLarge { count, available });
    }
    let pool = &right[..count];
    let mut used = vec![false; count];
    let mut worst = 0.0f64;
    for z in &left[..count] {
        let (best, dist) = pool
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, w)| (i, (z - w).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("pool has as many entries as queries");
        used[best] = true;
        worst = worst.max(dist);
    }
    Ok(worst)
}
