//! The Mellin transform `f̃(k) = (2π)^{-1/2} ∫ f(t) t^{-1/2-ik} dt`, which
//! diagonalizes the Carleman operator, and functions of that operator.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::LogGrid;
use crate::linalg::Toeplitz;
use crate::spectral::dispersion;

/// Fraction of nodes on each side used to measure truncation.
const EDGE_FRACTION: f64 = 0.02;

/// Tail mass above which a spectrum is flagged as truncated.
pub const TAIL_TOL: f64 = 1e-10;

/// Samples of `f̃` on the reciprocal grid `k_m = (m - ⌊n/2⌋) Δk`, `Δk = 2π / (n h)`.
#[derive(Debug, Clone)]
pub struct MellinSpectrum {
    grid: LogGrid,
    values: Vec<C64>,
    tail_mass: f64,
}

impl MellinSpectrum {
    /// A spectrum given by its values, e.g. a state prescribed through `f̃`.
    pub fn from_fn<F: Fn(f64) -> C64>(grid: &LogGrid, f: F) -> Self {
        let n = grid.len();
        let dk = 2.0 * PI / (n as f64 * grid.step());
        let c = (n / 2) as f64;
        let values = (0..n).map(|m| f((m as f64 - c) * dk)).collect();
        MellinSpectrum { grid: grid.clone(), values, tail_mass: 0.0 }
    }

    pub fn grid(&self) -> &LogGrid {
        &self.grid
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / (self.grid.len() as f64 * self.grid.step())
    }

    pub fn k(&self, m: usize) -> f64 {
        (m as f64 - (self.grid.len() / 2) as f64) * self.dk()
    }

    pub fn ks(&self) -> Vec<f64> {
        (0..self.values.len()).map(|m| self.k(m)).collect()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    /// Fraction of `‖f‖²` found near the ends of the window when the spectrum was computed.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// The truncation warning: `Some(tail mass)` when the input did not decay inside the window.
    pub fn truncation_warning(&self) -> Option<f64> {
        (self.tail_mass > TAIL_TOL).then_some(self.tail_mass)
    }

    pub fn norm_sq(&self) -> f64 {
        self.dk() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// Band-limited evaluation at an arbitrary `k`.
    pub fn interpolator(&self) -> SpectrumInterpolator {
        SpectrumInterpolator {
            x_min: self.grid.x_min(),
            h: self.grid.step(),
            samples: mellin_inverse(self),
        }
    }
}

/// Evaluates `f̃(k) = (2π)^{-1/2} h Σ_j g_j e^{-ikx_j}` off the reciprocal grid.
#[derive(Debug, Clone)]
pub struct SpectrumInterpolator {
    x_min: f64,
    h: f64,
    samples: Vec<C64>,
}

impl SpectrumInterpolator {
    pub fn eval(&self, k: f64) -> C64 {
        let r = C64::from_polar(1.0, -k * self.h);
        let mut acc = C64::new(0.0, 0.0);
        for g in self.samples.iter().rev() {
            acc = acc * r + g;
        }
        acc * C64::from_polar(self.h / (2.0 * PI).sqrt(), -k * self.x_min)
    }
}

fn shift_phase(n: usize, j: usize, sign: f64) -> C64 {
    let c = (n / 2) as f64;
    C64::from_polar(1.0, sign * 2.0 * PI * c * j as f64 / n as f64)
}

/// Forward transform of log samples `g(x_j) = e^{x_j/2} f(e^{x_j})`.
pub fn mellin_forward(grid: &LogGrid, g: &[C64]) -> Result<MellinSpectrum> {
    grid.check_len(g.len())?;
    let n = grid.len();
    let mut buf: Vec<C64> = g.iter().enumerate().map(|(j, v)| v * shift_phase(n, j, 1.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let dk = 2.0 * PI / (n as f64 * grid.step());
    let c = (n / 2) as f64;
    let scale = grid.step() / (2.0 * PI).sqrt();
    for (m, v) in buf.iter_mut().enumerate() {
        let k = (m as f64 - c) * dk;
        *v *= C64::from_polar(scale, -k * grid.x_min());
    }
    Ok(MellinSpectrum { grid: grid.clone(), values: buf, tail_mass: grid.edge_mass(g, EDGE_FRACTION) })
}

/// Inverse transform back to log samples on the spectrum's grid.
pub fn mellin_inverse(spec: &MellinSpectrum) -> Vec<C64> {
    let grid = &spec.grid;
    let n = grid.len();
    let dk = spec.dk();
    let mut buf: Vec<C64> = spec
        .values
        .iter()
        .enumerate()
        .map(|(m, v)| v * C64::from_polar(1.0, spec.k(m) * grid.x_min()))
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = dk / (2.0 * PI).sqrt();
    buf.iter()
        .enumerate()
        .map(|(j, v)| v * shift_phase(n, j, -1.0) * scale)
        .collect()
}

/// Whether a function of the Carleman operator is applied as a Fourier multiplier
/// or through its convolution kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Multiplier,
    Kernel,
}

/// `φ(C) f` for a bounded Borel function `φ` on `[0, π]`.
///
/// The multiplier route computes `M* φ(λ(k)) M f` with the FFT. The kernel route
/// convolves with `𝐪(u) = (2π)⁻¹ ∫ u^{ik} φ(λ(k)) dk`, which needs `λ⁻¹φ(λ)`
/// integrable near 0.
pub fn apply_operator_function<F: Fn(f64) -> C64>(
    grid: &LogGrid,
    g: &[C64],
    phi: F,
    route: Route,
) -> Result<Vec<C64>> {
    grid.check_len(g.len())?;
    match route {
        Route::Multiplier => {
            let mut spec = mellin_forward(grid, g)?;
            let ks = spec.ks();
            for (v, k) in spec.values.iter_mut().zip(ks) {
                *v *= phi(dispersion(k));
            }
            Ok(mellin_inverse(&spec))
        }
        Route::Kernel => Ok(operator_kernel(grid, phi)?.matvec(g)),
    }
}

/// Nyström matrix `h 𝐪(x_i - x_j)` of `φ(C)` in log coordinates.
pub fn operator_kernel<F: Fn(f64) -> C64>(grid: &LogGrid, phi: F) -> Result<Toeplitz<C64>> {
    let n = grid.len();
    let h = grid.step();
    let w_max = (n - 1) as f64 * h;
    let dk = 2.0 * PI / (2.0 * w_max + 60.0);
    let scale = (0..=20).map(|i| phi(dispersion(i as f64 * 0.05)).norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(Toeplitz::from_fn(n, |_| C64::new(0.0, 0.0)));
    }
    let mut k_cut = None;
    let mut k = 1.0;
    while k <= 60.0 {
        let tail = (0..4).map(|i| phi(dispersion(k + i as f64)).norm()).fold(0.0, f64::max);
        if tail <= 1e-17 * scale {
            k_cut = Some(k);
            break;
        }
        k += 0.5;
    }
    let k_cut = k_cut.ok_or_else(|| {
        Error::RouteRefused("phi(lambda) / lambda is not integrable near lambda = 0".into())
    })?;
    let m = (k_cut / dk).ceil() as usize;
    let samples: Vec<C64> = (0..=m)
        .map(|i| {
            let w = if i == 0 { 0.5 } else { 1.0 };
            phi(dispersion(i as f64 * dk)) * w
        })
        .collect();
    Ok(Toeplitz::from_fn(n, |d| {
        let w = d as f64 * h;
        let s: C64 = samples
            .iter()
            .enumerate()
            .map(|(i, v)| v * (i as f64 * dk * w).cos())
            .sum();
        s * (dk / PI) * h
    }))
}

/// The Carleman kernel in log coordinates, `1 / (2 cosh(w/2))`.
pub fn carleman_log_kernel(w: f64) -> f64 {
    0.5 / (0.5 * w).cosh()
}

/// Nyström matrix of `C` on the grid.
pub fn carleman_operator(grid: &LogGrid) -> Toeplitz<f64> {
    let h = grid.step();
    Toeplitz::from_fn(grid.len(), |d| h * carleman_log_kernel(d as f64 * h))
}

pub fn carleman_matrix(grid: &LogGrid) -> DMatrix<f64> {
    carleman_operator(grid).to_dense()
}

/// `C f` by direct quadrature of `∫ f(s)/(t+s) ds` in log coordinates.
pub fn apply_carleman(grid: &LogGrid, g: &[C64]) -> Result<Vec<C64>> {
    grid.check_len(g.len())?;
    Ok(carleman_operator(grid).matvec(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: &LogGrid) -> Vec<C64> {
        grid.sample_log(|x| C64::new((-x * x / 2.0).exp(), 0.0))
    }

    #[test]
    fn gaussian_is_self_dual() {
        let grid = LogGrid::new(-40.0, 40.0, 4096).unwrap();
        let spec = mellin_forward(&grid, &gaussian(&grid)).unwrap();
        for (k, v) in spec.ks().iter().zip(spec.values()) {
            assert!((v - C64::new((-k * k / 2.0).exp(), 0.0)).norm() < 1e-12);
        }
        assert!(spec.truncation_warning().is_none());
    }

    #[test]
    fn interpolation_matches_grid_values() {
        let grid = LogGrid::new(-20.0, 20.0, 512).unwrap();
        let g = grid.sample_log(|x| C64::new((-(x - 1.0).powi(2)).exp(), 0.3 * (-x * x).exp()));
        let spec = mellin_forward(&grid, &g).unwrap();
        let it = spec.interpolator();
        for m in [0, 100, 256, 300, 511] {
            assert!((it.eval(spec.k(m)) - spec.values()[m]).norm() < 1e-12);
        }
    }

    #[test]
    fn slow_tails_are_flagged() {
        let grid = LogGrid::new(-10.0, 10.0, 256).unwrap();
        let g = grid.sample_log(|x| C64::new(1.0 / (1.0 + x * x).sqrt(), 0.0));
        let spec = mellin_forward(&grid, &g).unwrap();
        assert!(spec.truncation_warning().is_some());
    }

    #[test]
    fn nonintegrable_symbol_is_refused() {
        let grid = LogGrid::new(-10.0, 10.0, 128).unwrap();
        let g = gaussian(&grid);
        let r = apply_operator_function(&grid, &g, |_| C64::new(1.0, 0.0), Route::Kernel);
        assert!(matches!(r, Err(Error::RouteRefused(_))));
    }
}
