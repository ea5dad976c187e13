//! Noise channels whose Kraus operators are proportional to phase-space
//! translations.
//!
//! Every channel here has the form
//!
//! ```text
//! S(ρ) = (1 − ε) ρ + (ε/N) Σ_α w(α) T_α ρ T_α†,    Σ_α w(α) = N,  w ≥ 0
//! ```
//!
//! so each translation `T_λ` is an eigenoperator with eigenvalue
//! `Σ(λ) = (1 − ε) + ε C̃(λ)`, where `C̃` is the symplectic Fourier transform of
//! the weight table. Applying the channel is then a pointwise product in the
//! chord representation; the explicit Kraus sum is kept as the slow oracle.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ChordError, Result};
use crate::operator::DenseOperator;
use crate::phasespace::{
    chord_inverse, chord_transform, symplectic_fourier, translation_operator, PhasePoint,
    TorusGeometry, WEDGE_SIGN,
};
use crate::states::DensityMatrix;

const WEIGHT_SUM_TOL: f64 = 1e-10;
const NEGATIVE_WEIGHT_TOL: f64 = 1e-12;

/// Largest N accepted by the explicit SU(N) generator construction.
pub const SU_N_MAX_DIM: usize = 16;

/// Which construction produced a channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum ChannelFamily {
    Depolarizing,
    PhaseDampingLine { n1: i64, n2: i64, n3: i64 },
    Gaussian { sigma: f64 },
    Custom,
}

/// `(1 − ε) I⊙I + (ε/N) Σ_α w(α) T_α⊙T_α†`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalChordChannel {
    geometry: TorusGeometry,
    epsilon: f64,
    weights: Vec<f64>,
    family: ChannelFamily,
}

/// Eigenvalue `Σ(λ)` attached to each eigenoperator `T_λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpectrum {
    geometry: TorusGeometry,
    values: Vec<Complex64>,
}

impl ChannelSpectrum {
    pub fn geometry(&self) -> &TorusGeometry {
        &self.geometry
    }

    pub fn get(&self, lambda: PhasePoint) -> Complex64 {
        self.values[self.geometry.index(lambda)]
    }

    /// Values in row-major point order.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (PhasePoint, Complex64)> + '_ {
        self.geometry.points().zip(self.values.iter().copied())
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(ChordError::EpsilonOutOfRange(epsilon));
    }
    Ok(())
}

impl DiagonalChordChannel {
    /// Validates `w ≥ 0` and `Σ w = N`.
    pub fn from_weights(geometry: TorusGeometry, epsilon: f64, weights: Vec<f64>) -> Result<Self> {
        Self::with_family(geometry, epsilon, weights, ChannelFamily::Custom)
    }

    fn with_family(
        geometry: TorusGeometry,
        epsilon: f64,
        weights: Vec<f64>,
        family: ChannelFamily,
    ) -> Result<Self> {
        check_epsilon(epsilon)?;
        if weights.len() != geometry.num_points() {
            return Err(ChordError::DimensionMismatch {
                expected: geometry.num_points(),
                found: weights.len(),
            });
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| w.is_nan() || **w < 0.0) {
            return Err(ChordError::NegativeWeight {
                point: geometry.from_index(i).to_string(),
                value: *w,
            });
        }
        let sum: f64 = weights.iter().sum();
        let expected = geometry.n() as f64;
        if (sum - expected).abs() > WEIGHT_SUM_TOL {
            return Err(ChordError::WeightNormalization { sum, expected });
        }
        Ok(Self { geometry, epsilon, weights, family })
    }

    pub fn geometry(&self) -> &TorusGeometry {
        &self.geometry
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn family(&self) -> ChannelFamily {
        self.family
    }

    /// Width of the Gaussian kernel, if this is a diffusion channel.
    pub fn sigma(&self) -> Option<f64> {
        match self.family {
            ChannelFamily::Gaussian { sigma } => Some(sigma),
            _ => None,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, alpha: PhasePoint) -> f64 {
        self.weights[self.geometry.index(alpha)]
    }

    /// Same weights at a different strength.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self { epsilon, ..self.clone() })
    }

    pub fn spectrum(&self) -> ChannelSpectrum {
        channel_spectrum(self)
    }

    /// Fast path: modulate the chord coefficients of `a` by the spectrum.
    pub fn apply_to_operator(&self, a: &DenseOperator) -> Result<DenseOperator> {
        if self.epsilon == 0.0 {
            if a.dim() != self.geometry.n() {
                return Err(ChordError::DimensionMismatch { expected: self.geometry.n(), found: a.dim() });
            }
            return Ok(a.clone());
        }
        let spectrum = self.spectrum();
        let mut symbol = chord_transform(a, &self.geometry)?;
        for (c, s) in symbol.coeffs_mut().iter_mut().zip(spectrum.values.iter()) {
            *c *= s;
        }
        Ok(chord_inverse(&symbol))
    }

    /// Oracle path: the explicit Kraus sum with dense translation matrices.
    pub fn apply_kraus_to_operator(&self, a: &DenseOperator) -> Result<DenseOperator> {
        let n = self.geometry.n();
        if a.dim() != n {
            return Err(ChordError::DimensionMismatch { expected: n, found: a.dim() });
        }
        let mut acc = a.entries().mapv(|z| z * (1.0 - self.epsilon));
        let scale = self.epsilon / n as f64;
        for (alpha, &w) in self.geometry.points().zip(&self.weights) {
            if w == 0.0 {
                continue;
            }
            let t = translation_operator(&self.geometry, alpha);
            let term = a.conjugate_by(&t)?;
            acc.scaled_add(Complex64::new(scale * w, 0.0), term.entries());
        }
        Ok(DenseOperator::from_array(acc))
    }

    /// `√(1−ε) I` followed by `√(ε w(α)/N) T_α` for every nonzero weight.
    pub fn kraus_set(&self) -> KrausSet {
        let n = self.geometry.n();
        let mut operators = vec![DenseOperator::identity(n).scale(Complex64::new((1.0 - self.epsilon).sqrt(), 0.0))];
        for (alpha, &w) in self.geometry.points().zip(&self.weights) {
            if w > 0.0 {
                let amp = (self.epsilon * w / n as f64).sqrt();
                operators.push(translation_operator(&self.geometry, alpha).scale(Complex64::new(amp, 0.0)));
            }
        }
        KrausSet { operators }
    }
}

/// `Σ(λ) = (1 − ε) + ε C̃(λ)`, `C̃(λ) = (1/N) Σ_α w(α) exp(s·i(2π/N)·λ∧α)`.
///
/// Gaussian channels return their defining table, which the transform of the
/// weights reproduces up to roundoff; the far tail stays exactly positive.
pub fn channel_spectrum(ch: &DiagonalChordChannel) -> ChannelSpectrum {
    let eps = ch.epsilon;
    let values = match ch.family {
        ChannelFamily::Gaussian { sigma } => gaussian_target(&ch.geometry, sigma)
            .expect("sigma validated at construction")
            .into_iter()
            .map(|c| (1.0 - eps) + eps * c)
            .collect(),
        _ => {
            let n = ch.geometry.n() as f64;
            let table: Vec<Complex64> = ch.weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
            symplectic_fourier(&ch.geometry, &table, WEDGE_SIGN)
                .into_iter()
                .map(|c| (1.0 - eps) + eps * c / n)
                .collect()
        }
    };
    ChannelSpectrum { geometry: ch.geometry, values }
}

pub fn apply_channel(ch: &DiagonalChordChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_channel_output(ch.apply_to_operator(rho.op())?))
}

pub fn apply_channel_kraus(ch: &DiagonalChordChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_channel_output(ch.apply_kraus_to_operator(rho.op())?))
}

/// Uniform average over all translations: `w(α) = 1/N`.
pub fn make_depolarizing(geom: &TorusGeometry, epsilon: f64) -> Result<DiagonalChordChannel> {
    let n = geom.n() as f64;
    DiagonalChordChannel::with_family(*geom, epsilon, vec![1.0 / n; geom.num_points()], ChannelFamily::Depolarizing)
}

/// Points of the grid line `n1·p ≡ n2·q + n3 (mod N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceLine {
    geometry: TorusGeometry,
    n1: i64,
    n2: i64,
    n3: i64,
    points: Vec<PhasePoint>,
}

impl PhaseSpaceLine {
    pub fn coefficients(&self) -> (i64, i64, i64) {
        (self.n1, self.n2, self.n3)
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    /// Number of grid points on the line.
    pub fn r(&self) -> usize {
        self.points.len()
    }

    pub fn contains(&self, pt: PhasePoint) -> bool {
        self.points.binary_search(&pt).is_ok()
    }
}

pub fn line_points(geom: &TorusGeometry, n1: i64, n2: i64, n3: i64) -> Result<PhaseSpaceLine> {
    let n = geom.n() as i64;
    if n1.rem_euclid(n) == 0 && n2.rem_euclid(n) == 0 {
        return Err(ChordError::DegenerateLine { n: geom.n() });
    }
    let points: Vec<PhasePoint> = geom
        .points()
        .filter(|pt| (n1 * pt.p as i64 - n2 * pt.q as i64 - n3).rem_euclid(n) == 0)
        .collect();
    if points.is_empty() {
        return Err(ChordError::EmptyLine { n1, n2, n3, n: geom.n() });
    }
    Ok(PhaseSpaceLine { geometry: *geom, n1, n2, n3, points })
}

/// Average over the translations of a line: `w(α) = N/r` on the line.
pub fn make_phase_damping_line(
    geom: &TorusGeometry,
    line: &PhaseSpaceLine,
    epsilon: f64,
) -> Result<DiagonalChordChannel> {
    if line.geometry != *geom {
        return Err(ChordError::DimensionMismatch { expected: geom.n(), found: line.geometry.n() });
    }
    let weight = geom.n() as f64 / line.r() as f64;
    let mut weights = vec![0.0; geom.num_points()];
    for pt in &line.points {
        weights[geom.index(*pt)] = weight;
    }
    let (n1, n2, n3) = line.coefficients();
    DiagonalChordChannel::with_family(*geom, epsilon, weights, ChannelFamily::PhaseDampingLine { n1, n2, n3 })
}

/// Images of the chord-space Gaussian summed on each side are capped here;
/// smaller widths are rejected.
const MAX_GAUSSIAN_IMAGES: i64 = 100_000;

/// Diffusion channel (`ε = 1`) whose spectrum is the periodized Gaussian
/// `C̃(λ) ∝ Σ_images exp[−2π²σ²(μ_c² + ν_c²)]` in centred chord coordinates,
/// normalized to `C̃(0) = 1`.
///
/// For `σN ≳ 1` the images are below double precision and `C̃` is the plain
/// centred Gaussian of half-width `1/(2πσ)` chord units. The weights are the
/// inverse symplectic transform, a product of theta functions and hence
/// nonnegative.
pub fn make_gaussian(geom: &TorusGeometry, sigma: f64) -> Result<DiagonalChordChannel> {
    let nf = geom.n() as f64;
    let target = gaussian_target(geom, sigma)?;
    let raw = symplectic_fourier(geom, &target, WEDGE_SIGN);
    let mut weights: Vec<f64> = raw.iter().map(|z| z.re / nf).collect();
    if let Some((i, w)) = weights
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .filter(|(_, w)| **w < -NEGATIVE_WEIGHT_TOL)
    {
        return Err(ChordError::NegativeWeight { point: geom.from_index(i).to_string(), value: *w });
    }
    for w in weights.iter_mut() {
        *w = w.max(0.0);
    }
    let sum: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w *= nf / sum;
    }
    DiagonalChordChannel::with_family(*geom, 1.0, weights, ChannelFamily::Gaussian { sigma })
}

/// Normalized periodized Gaussian `C̃(λ)` in row-major point order.
fn gaussian_target(geom: &TorusGeometry, sigma: f64) -> Result<Vec<Complex64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(ChordError::InvalidSigma(sigma));
    }
    let n = geom.n();
    let decay = 2.0 * std::f64::consts::PI.powi(2) * sigma * sigma;
    // exp(−decay·x²) < e^{-60} once |x| > sqrt(60/decay)
    let reach = (60.0 / decay).sqrt() / n as f64;
    if reach > MAX_GAUSSIAN_IMAGES as f64 {
        return Err(ChordError::InvalidSigma(sigma));
    }
    let images = reach.ceil() as i64 + 1;
    let profile: Vec<f64> = (0..n)
        .map(|x| {
            let centred = geom.centered(x) as f64;
            (-images..=images)
                .map(|j| {
                    let y = centred + (j * n as i64) as f64;
                    (-decay * y * y).exp()
                })
                .sum()
        })
        .collect();
    let norm = profile[0] * profile[0];
    Ok(geom
        .points()
        .map(|pt| Complex64::new(profile[pt.q] * profile[pt.p] / norm, 0.0))
        .collect())
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

/// `x⁻¹ mod n` when `gcd(x, n) = 1`.
pub fn mod_inverse(x: i64, n: i64) -> Option<i64> {
    let x = x.rem_euclid(n);
    if gcd(x, n) != 1 {
        return None;
    }
    // extended Euclid
    let (mut r0, mut r1) = (n, x);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    Some(t0.rem_euclid(n))
}

/// Closed-form spectrum of the line channel, written in the crate's wedge
/// sign convention:
///
/// * `n1` invertible: `1 − ε + ε·exp(s·i2π μ n3 n1⁻¹/N)·[n2 μ ≡ n1 ν]`
/// * `n1 ≡ 0`, `n2` invertible: `1 − ε + ε·exp(s·i2π ν n3 n2⁻¹/N)·[μ ≡ 0]`
///
/// Returns `None` when the needed modular inverse does not exist.
pub fn line_spectrum_closed_form(
    geom: &TorusGeometry,
    n1: i64,
    n2: i64,
    n3: i64,
    epsilon: f64,
) -> Option<ChannelSpectrum> {
    let n = geom.n() as i64;
    let eps = epsilon;
    let values = if let Some(inv) = mod_inverse(n1, n) {
        let shift = (n3 * inv).rem_euclid(n);
        geom.points()
            .map(|pt| {
                let (mu, nu) = (pt.q as i64, pt.p as i64);
                if (n2 * mu - n1 * nu).rem_euclid(n) == 0 {
                    (1.0 - eps) + eps * geom.half_root(2 * WEDGE_SIGN * mu * shift)
                } else {
                    Complex64::new(1.0 - eps, 0.0)
                }
            })
            .collect()
    } else if n1.rem_euclid(n) == 0 {
        let inv = mod_inverse(n2, n)?;
        let shift = (n3 * inv).rem_euclid(n);
        geom.points()
            .map(|pt| {
                if pt.q == 0 {
                    (1.0 - eps) + eps * geom.half_root(2 * WEDGE_SIGN * pt.p as i64 * shift)
                } else {
                    Complex64::new(1.0 - eps, 0.0)
                }
            })
            .collect()
    } else {
        return None;
    };
    Some(ChannelSpectrum { geometry: *geom, values })
}

/// Kraus operators `M_μ` with `Σ M_μ† M_μ = I`.
#[derive(Clone, Debug)]
pub struct KrausSet {
    operators: Vec<DenseOperator>,
}

impl KrausSet {
    pub fn new(operators: Vec<DenseOperator>) -> Self {
        Self { operators }
    }

    pub fn operators(&self) -> &[DenseOperator] {
        &self.operators
    }

    /// Max-entry deviation of `Σ M† M` from the identity.
    pub fn completeness_residual(&self) -> f64 {
        let Some(first) = self.operators.first() else {
            return f64::INFINITY;
        };
        let n = first.dim();
        let mut acc = Array2::<Complex64>::zeros((n, n));
        for m in &self.operators {
            acc = acc + m.adjoint().entries().dot(m.entries());
        }
        DenseOperator::from_array(acc).max_abs_diff(&DenseOperator::identity(n)).unwrap_or(f64::INFINITY)
    }

    pub fn apply(&self, a: &DenseOperator) -> Result<DenseOperator> {
        let mut acc = DenseOperator::zeros(a.dim());
        for m in &self.operators {
            acc = acc.add(&a.conjugate_by(m)?)?;
        }
        Ok(acc)
    }
}

/// Matrix of a linear map on `N × N` operators in the skew-projector basis
/// `P_ij = |i⟩⟨j|`, row-major: entry `[(i,j), (k,l)] = ⟨P_ij, f(P_kl)⟩`.
pub fn superoperator_matrix(
    dim: usize,
    f: impl Fn(&DenseOperator) -> Result<DenseOperator>,
) -> Result<Array2<Complex64>> {
    let mut out = Array2::zeros((dim * dim, dim * dim));
    for k in 0..dim {
        for l in 0..dim {
            let mut proj = Array2::zeros((dim, dim));
            proj[[k, l]] = Complex64::new(1.0, 0.0);
            let image = f(&DenseOperator::from_array(proj))?;
            for i in 0..dim {
                for j in 0..dim {
                    out[[i * dim + j, k * dim + l]] = image.get(i, j);
                }
            }
        }
    }
    Ok(out)
}

/// The `N² − 1` generalized Gell-Mann generators of SU(N), ordered as all
/// symmetric `U_jk`, then antisymmetric `V_jk` (`j < k`), then diagonal `W_l`.
/// Normalized to `Tr(γ_μ γ_ν) = 2δ_μν`.
pub fn su_n_generators(n: usize) -> Vec<DenseOperator> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut gens = Vec::with_capacity(n * n - 1);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).collect();
    for &(j, k) in &pairs {
        let mut m = Array2::from_elem((n, n), zero);
        m[[j, k]] = one;
        m[[k, j]] = one;
        gens.push(DenseOperator::from_array(m));
    }
    for &(j, k) in &pairs {
        let mut m = Array2::from_elem((n, n), zero);
        m[[j, k]] = i;
        m[[k, j]] = -i;
        gens.push(DenseOperator::from_array(m));
    }
    for l in 1..n {
        let lf = l as f64;
        let c = -(2.0 / (lf * (lf + 1.0))).sqrt();
        let mut m = Array2::from_elem((n, n), zero);
        for d in 0..l {
            m[[d, d]] = Complex64::new(c, 0.0);
        }
        m[[l, l]] = Complex64::new(-c * lf, 0.0);
        gens.push(DenseOperator::from_array(m));
    }
    gens
}

/// Depolarizing superoperator assembled from SU(N) generators,
/// `(1 − ε) I⊙I + (ε/N) Σ_μ Q_μ⊙Q_μ` with `Q_0 = I/√N`, `Q_μ = γ_μ/√2`,
/// as a matrix in the skew-projector basis.
pub fn su_n_generator_superoperator(geom: &TorusGeometry, epsilon: f64) -> Result<Array2<Complex64>> {
    check_epsilon(epsilon)?;
    let n = geom.n();
    if n > SU_N_MAX_DIM {
        return Err(ChordError::ScaleGuard { n, max: SU_N_MAX_DIM, what: "SU(N) generator oracle" });
    }
    let mut basis = vec![DenseOperator::identity(n).scale(Complex64::new(1.0 / (n as f64).sqrt(), 0.0))];
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    basis.extend(su_n_generators(n).into_iter().map(|g| g.scale(inv_sqrt2)));

    let dim2 = n * n;
    let mut out = Array2::<Complex64>::zeros((dim2, dim2));
    for d in 0..dim2 {
        out[[d, d]] = Complex64::new(1.0 - epsilon, 0.0);
    }
    let coeff = epsilon / n as f64;
    for q in &basis {
        // vec(Q X Q†) = (Q ⊗ conj Q) vec(X) for row-major vec
        for i in 0..n {
            for k in 0..n {
                let a = q.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    for l in 0..n {
                        out[[i * n + j, k * n + l]] += coeff * a * q.get(j, l).conj();
                    }
                }
            }
        }
    }
    Ok(out)
}
