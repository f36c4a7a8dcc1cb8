//! The unitary group `e^{-iCT}` and its large-time stationary-phase asymptotics.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::LogGrid;
use crate::mellin::{mellin_forward, mellin_inverse, MellinSpectrum};
use crate::spectral::dispersion;

/// Inflection point of `λ(k)`: `λ''(k₀) = 0`, `k₀ = π⁻¹ ln(1 + √2)`.
pub fn k0() -> f64 {
    (1.0 + SQRT_2).ln() / PI
}

/// `λ'(k) = -π² sinh(πk) / cosh²(πk)`.
pub fn lambda_prime(k: f64) -> f64 {
    let a = PI * k;
    -PI * PI * a.tanh() / a.cosh()
}

/// `λ''(k) = -π³ (cosh² - 2 sinh²) / cosh³` at `πk`.
pub fn lambda_second(k: f64) -> f64 {
    let a = PI * k;
    let th = a.tanh();
    -PI.powi(3) * (1.0 - 2.0 * th * th) / a.cosh()
}

/// `exp(-1/(1-y²))` on `(lo, hi)` with `y` the affine image of `k` in `(-1, 1)`; zero outside.
pub fn smooth_bump(k: f64, lo: f64, hi: f64) -> f64 {
    let y = (2.0 * k - lo - hi) / (hi - lo);
    if y.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - y * y)).exp()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EvolutionConfig {
    /// Smallest `|T|` for the asymptotic formula.
    pub t_min: f64,
    /// Guard band around `τ = 0`, where the two stationary points separate from `k = 0` and `∞`.
    pub guard_center: f64,
    /// Guard band around `|τ| = 1`, where the stationary points coalesce at `±k₀`.
    pub guard_edge: f64,
    /// `f̃` must vanish within this distance of `0` and `±k₀`.
    pub support_margin: f64,
    /// Relative size below which `f̃` counts as vanishing.
    pub support_tol: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            t_min: 10.0,
            guard_center: 0.02,
            guard_edge: 0.02,
            support_margin: 0.02,
            support_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StationaryPoint {
    pub k: f64,
    /// Phase rate `ω = π² k τ / 2 + λ(k)`.
    pub omega: f64,
    pub lambda_second: f64,
}

/// The two stationary points of `k ↦ λ(k) + π² k τ / 2` for `0 < |τ| < 1`;
/// `points[0]` lies in `|k| < k₀`, `points[1]` in `|k| > k₀`.
#[derive(Debug, Clone, Copy)]
pub struct StationaryData {
    pub tau: f64,
    pub points: [StationaryPoint; 2],
}

pub fn stationary_points(tau: f64, cfg: &EvolutionConfig) -> Result<StationaryData> {
    let a = tau.abs();
    if !(a < 1.0) {
        return Err(Error::domain("tau", format!("|tau| = {a} >= 1: no stationary points")));
    }
    if a <= cfg.guard_center {
        return Err(Error::Precondition(format!(
            "|tau| = {a} inside the guard band around 0"
        )));
    }
    if 1.0 - a <= cfg.guard_edge {
        return Err(Error::Precondition(format!(
            "|tau| = {a} inside the coalescence band around 1"
        )));
    }
    Ok(stationary_unchecked(tau))
}

fn stationary_unchecked(tau: f64) -> StationaryData {
    let a = tau.abs();
    let root = ((1.0 - a) * (1.0 + a)).sqrt();
    let sig = [a * a / (1.0 + root), 1.0 + root];
    let mk = |j: usize| {
        let s = sig[j];
        let num = s + (2.0 * s).sqrt();
        let k = tau.signum() * (num / a).ln() / PI;
        let lam = 2.0 * PI * a * num / (num * num + a * a);
        let sign = if j == 0 { -1.0 } else { 1.0 };
        StationaryPoint {
            k,
            omega: PI * PI * k * tau / 2.0 + lam,
            lambda_second: sign * PI.powi(3) * a * ((1.0 - a * a) / (2.0 * s)).sqrt(),
        }
    };
    StationaryData { tau, points: [mk(0), mk(1)] }
}

/// `e^{-iCT}` applied to the spectrum, returned as log samples.
pub fn propagate_spectrum(spec: &MellinSpectrum, time: f64) -> Vec<C64> {
    let mut s = spec.clone();
    let ks = s.ks();
    for (v, k) in s.values_mut().iter_mut().zip(ks) {
        *v *= C64::from_polar(1.0, -dispersion(k) * time);
    }
    mellin_inverse(&s)
}

/// Smallest interval outside of which each side carries at most `tol` of the norm.
fn support(grid: &LogGrid, g: &[C64], tol: f64) -> (f64, f64) {
    let total: f64 = g.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return (0.0, 0.0);
    }
    let cut = |it: &mut dyn Iterator<Item = (usize, &C64)>| {
        let mut acc = 0.0;
        for (i, v) in it {
            acc += v.norm_sqr();
            if acc > tol * total {
                return i;
            }
        }
        0
    };
    let lo = cut(&mut g.iter().enumerate());
    let hi = cut(&mut g.iter().enumerate().rev());
    (grid.x(lo), grid.x(hi))
}

/// `e^{-iCT} f` via the Mellin multiplier `e^{-iλ(k)T}`.
///
/// The group moves mass by up to `π²|T|/2` in `ln t`; the window must hold that.
pub fn propagate_exact(grid: &LogGrid, g: &[C64], time: f64) -> Result<Vec<C64>> {
    let (lo, hi) = support(grid, g, 1e-8);
    let spread = PI * PI * time.abs() / 2.0;
    if lo - spread < grid.x_min() || hi + spread > grid.x_max() {
        return Err(Error::GridTooSmall(format!(
            "support [{lo}, {hi}] spreads by {spread} past [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    let spec = mellin_forward(grid, g)?;
    let out = propagate_spectrum(&spec, time);
    let edge = grid.edge_mass(&out, 0.02);
    if edge > 1e-8 {
        return Err(Error::GridTooSmall(format!("propagated state has edge mass {edge:e}")));
    }
    Ok(out)
}

/// One asymptotic sample; `reliable` is false inside the guard bands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSample {
    pub value: C64,
    pub reliable: bool,
}

/// `(U₁ f)(t)` and `(U₂ f)(t)` in log representation on the spectrum's grid.
#[derive(Debug, Clone)]
pub struct AsymptoticComponents {
    pub time: f64,
    pub u1: Vec<C64>,
    pub u2: Vec<C64>,
    pub reliable: Vec<bool>,
}

impl AsymptoticComponents {
    pub fn total(&self) -> Vec<C64> {
        self.u1.iter().zip(&self.u2).map(|(a, b)| a + b).collect()
    }
}

fn check_spectrum(spec: &MellinSpectrum, time: f64, cfg: &EvolutionConfig) -> Result<()> {
    if !(time.abs() >= cfg.t_min) {
        return Err(Error::Precondition(format!("|T| = {} below {}", time.abs(), cfg.t_min)));
    }
    let max = spec.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let k0 = k0();
    for (k, v) in spec.ks().iter().zip(spec.values()) {
        let near = k.abs() < cfg.support_margin || (k.abs() - k0).abs() < cfg.support_margin;
        if near && v.norm() > cfg.support_tol * max {
            return Err(Error::Precondition(format!(
                "spectrum does not vanish near k = {k} (|f~| = {:e})",
                v.norm()
            )));
        }
    }
    Ok(())
}

/// Value of the two asymptotic terms at `x = ln t`, in log representation.
fn components_at(interp: &crate::mellin::SpectrumInterpolator, time: f64, x: f64, cfg: &EvolutionConfig) -> (C64, C64, bool) {
    let tau = -2.0 * x / (PI * PI * time);
    let a = tau.abs();
    if a >= 1.0 {
        return (C64::new(0.0, 0.0), C64::new(0.0, 0.0), true);
    }
    let reliable = a > cfg.guard_center && 1.0 - a > cfg.guard_edge;
    if tau == 0.0 {
        return (C64::new(0.0, 0.0), C64::new(0.0, 0.0), false);
    }
    let data = stationary_unchecked(tau);
    let pre = time.abs().powf(-0.5);
    let mut out = [C64::new(0.0, 0.0); 2];
    for (j, p) in data.points.iter().enumerate() {
        let delta = if j == 0 { 1.0 } else { -1.0 } * time.signum() * FRAC_PI_4;
        let phase = C64::from_polar(pre * p.lambda_second.abs().powf(-0.5), delta - p.omega * time);
        out[j] = phase * interp.eval(p.k);
    }
    (out[0], out[1], reliable)
}

/// The stationary-phase approximation `(U₁ f)(t) + (U₂ f)(t)` of `(e^{-iCT} f)(t)`.
pub fn propagate_stationary_phase(
    spec: &MellinSpectrum,
    time: f64,
    t: f64,
    cfg: &EvolutionConfig,
) -> Result<PhaseSample> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("t", format!("{t} must be positive")));
    }
    check_spectrum(spec, time, cfg)?;
    let (a, b, reliable) = components_at(&spec.interpolator(), time, t.ln(), cfg);
    Ok(PhaseSample { value: (a + b) / t.sqrt(), reliable })
}

pub fn stationary_phase_components(
    spec: &MellinSpectrum,
    time: f64,
    cfg: &EvolutionConfig,
) -> Result<AsymptoticComponents> {
    check_spectrum(spec, time, cfg)?;
    let interp = spec.interpolator();
    let grid = spec.grid();
    let mut out = AsymptoticComponents {
        time,
        u1: Vec::with_capacity(grid.len()),
        u2: Vec::with_capacity(grid.len()),
        reliable: Vec::with_capacity(grid.len()),
    };
    for i in 0..grid.len() {
        let (a, b, r) = components_at(&interp, time, grid.x(i), cfg);
        out.u1.push(a);
        out.u2.push(b);
        out.reliable.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        for &k in &[-1.3, -0.2, 0.0, 0.1, 0.28, 0.7, 2.5] {
            let e = 1e-5;
            let d1 = (dispersion(k + e) - dispersion(k - e)) / (2.0 * e);
            let d2 = (dispersion(k + e) - 2.0 * dispersion(k) + dispersion(k - e)) / (e * e);
            assert!((d1 - lambda_prime(k)).abs() < 1e-8);
            assert!((d2 - lambda_second(k)).abs() < 1e-4);
        }
        assert!(lambda_second(k0()).abs() < 1e-13);
    }

    #[test]
    fn stationary_points_solve_the_phase_equation() {
        let cfg = EvolutionConfig::default();
        for &tau in &[0.05, 0.3, -0.6, 0.95] {
            let d = stationary_points(tau, &cfg).unwrap();
            for p in d.points {
                assert!((lambda_prime(p.k) + PI * PI * tau / 2.0).abs() < 1e-11);
                assert!((p.lambda_second - lambda_second(p.k)).abs() < 1e-9);
                assert!((p.omega - (PI * PI * p.k * tau / 2.0 + dispersion(p.k))).abs() < 1e-12);
            }
            assert!(d.points[0].k.abs() < k0() && d.points[1].k.abs() > k0());
            assert!(d.points[0].lambda_second < 0.0 && d.points[1].lambda_second > 0.0);
        }
        assert!(stationary_points(1.2, &cfg).is_err());
        assert!(stationary_points(0.01, &cfg).is_err());
        assert!(stationary_points(0.99, &cfg).is_err());
    }
}
