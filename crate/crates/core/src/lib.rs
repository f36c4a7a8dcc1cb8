//! Spectral theory, time evolution and scattering for the Carleman operator
//! `(Cf)(t) = ∫₀^∞ f(s)/(t+s) ds` on `L²(ℝ₊)` and its trace-class perturbations.
//!
//! Everything is computed in the log coordinate `x = ln t`, where `C` becomes a
//! convolution and the Mellin transform becomes the Fourier transform.

pub mod discrete;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod linalg;
pub mod mellin;
pub mod perturbation;
pub mod scattering;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::LogGrid;
pub use perturbation::PerturbationKernel;
pub use spectral::{Side, SpectralPoint};
pub use num_complex::Complex64 as C64;
