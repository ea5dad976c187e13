//! Quantum noise channels that are diagonal in the chord (characteristic
//! function) representation of a discrete toroidal phase space.
//!
//! The crate is organised bottom-up:
//!
//! * [`phasespace`]: torus geometry, Weyl–Heisenberg translations with exact
//!   composition phases and the chord transform pair.
//! * [`states`]: basis, coherent and cat states, density matrices and the
//!   discrete Wigner function on the doubled `2N × 2N` grid.
//! * [`channels`]: depolarizing, line phase-damping and Gaussian diffusion
//!   channels, their spectra, fast chord-modulation application and the
//!   explicit Kraus-sum oracle.
//! * [`dynamics`]: quantized linear (cat) maps, position kicks and the
//!   chord-basis supermatrix of a unitary step.
//! * [`spectral`]: the noise-truncated propagator and its leading spectrum.

pub mod channels;
pub mod dynamics;
mod error;
pub mod operator;
pub mod phasespace;
pub mod spectral;
pub mod states;

pub use error::{ChordError, Result};
pub use operator::DenseOperator;
pub use phasespace::{PhasePoint, TorusGeometry};

pub use num_complex::Complex64;
