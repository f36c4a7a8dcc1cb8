//! Dispersion relation, branch functions and closed-form kernels of the
//! resolvent and spectral family of the Carleman operator `(Cf)(t) = ∫ f(s)/(t+s) ds`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Default distance from the thresholds 0 and π below which boundary values are refused.
pub const LAMBDA_MIN: f64 = 1e-6;

/// Below this `|ln u|` the kernel functions switch to their Taylor expansions.
const SERIES_W: f64 = 1e-3;

/// Largest order accepted by [`resonance_series`].
pub const MAX_SERIES_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Limit from the upper half-plane, `λ + i0`.
    Plus,
    /// Limit from the lower half-plane, `λ - i0`.
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// A spectral parameter: either a point off the spectrum `[0, π]`, or a real
/// `λ` with a side of approach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralPoint {
    OffCut(C64),
    Boundary { lambda: f64, side: Side },
}

impl SpectralPoint {
    pub fn new(z: C64) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::domain("z", format!("{z} is not finite")));
        }
        if z.im == 0.0 && (0.0..=PI).contains(&z.re) {
            return Err(Error::Ambiguous { re: z.re, im: z.im });
        }
        Ok(SpectralPoint::OffCut(z))
    }

    pub fn boundary(lambda: f64, side: Side) -> Result<Self> {
        if !lambda.is_finite() || lambda == 0.0 || lambda.abs() > PI {
            return Err(Error::domain(
                "lambda",
                format!("{lambda} must lie in [-pi, pi] without 0"),
            ));
        }
        Ok(SpectralPoint::Boundary { lambda, side })
    }

    /// Convenience: `λ + i·eps` for `eps != 0`, otherwise the `+i0` boundary value
    /// when `λ` lies on the spectrum and the real point elsewhere.
    pub fn from_parts(lambda: f64, eps: f64) -> Result<Self> {
        if eps != 0.0 {
            return Self::new(C64::new(lambda, eps));
        }
        if lambda > 0.0 && lambda <= PI {
            Self::boundary(lambda, Side::Plus)
        } else {
            Self::new(C64::new(lambda, 0.0))
        }
    }

    pub fn z(&self) -> C64 {
        match *self {
            SpectralPoint::OffCut(z) => z,
            SpectralPoint::Boundary { lambda, .. } => C64::new(lambda, 0.0),
        }
    }

    /// Real `z` in `(-π, 0)`: the resolvent is analytic there but `φ`, `q`, `𝐤` are not.
    fn is_real_negative_cut(&self) -> bool {
        matches!(*self, SpectralPoint::OffCut(z) if z.im == 0.0 && z.re > -PI && z.re < 0.0)
    }
}

/// `λ(k) = π / cosh(πk)`, the eigenvalue of `C` on `t^{-1/2 ± ik}`.
pub fn lambda_of_k(k: f64) -> Result<f64> {
    if !k.is_finite() || k < 0.0 {
        return Err(Error::domain("k", format!("{k} must be finite and >= 0")));
    }
    Ok(PI / (PI * k).cosh())
}

/// `λ(k)` extended evenly to all real `k`.
pub fn dispersion(k: f64) -> f64 {
    PI / (PI * k).cosh()
}

/// Inverse of [`lambda_of_k`] on `(0, π]`.
pub fn k_of_lambda(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= PI) {
        return Err(Error::domain("lambda", format!("{lambda} not in (0, pi]")));
    }
    let root = ((PI - lambda) * (PI + lambda)).sqrt();
    Ok(((PI - lambda + root) / lambda).ln_1p() / PI)
}

/// `φ(z) = (z² - π²)^{1/2}`, positive for `z > π`, cut along `[-π, π]`.
pub fn phi(point: &SpectralPoint) -> Result<C64> {
    match *point {
        SpectralPoint::OffCut(z) => {
            if point.is_real_negative_cut() {
                return Err(Error::Ambiguous { re: z.re, im: z.im });
            }
            Ok(phi_principal(z))
        }
        SpectralPoint::Boundary { lambda, side } => {
            let root = ((PI - lambda.abs()) * (PI + lambda.abs())).sqrt();
            Ok(C64::new(0.0, side.sign() * root))
        }
    }
}

fn phi_principal(z: C64) -> C64 {
    (z - PI).sqrt() * (z + PI).sqrt()
}

/// `q(z) = (π - iφ(z)) / z`.
pub fn q_of(point: &SpectralPoint) -> Result<C64> {
    let ph = phi(point)?;
    Ok((C64::new(PI, 0.0) - C64::i() * ph) / point.z())
}

/// Quasi-momentum `𝐤(z) = π⁻¹ (ln|q| + i arg q)` with `arg q ∈ (0, 2π)`.
///
/// Boundary values use the closed forms `±k(λ) + 2i` on `(0, π]` and `±k(|λ|) + i` on `[-π, 0)`.
pub fn branch_k(point: &SpectralPoint) -> Result<C64> {
    match *point {
        SpectralPoint::OffCut(z) => {
            if z.im == 0.0 && z.re == -PI {
                return Ok(C64::new(0.0, 1.0));
            }
            let q = q_of(point)?;
            let mut arg = q.arg();
            if arg <= 0.0 {
                arg += 2.0 * PI;
            }
            Ok(C64::new(q.norm().ln(), arg) / PI)
        }
        SpectralPoint::Boundary { lambda, side } => {
            let k = k_of_lambda(lambda.abs())?;
            let im = if lambda > 0.0 { 2.0 } else { 1.0 };
            Ok(C64::new(side.sign() * k, im))
        }
    }
}

/// `θ(z) = 2 + i𝐤(z)`, computed without cancellation near `z = π`.
pub fn theta(point: &SpectralPoint) -> Result<C64> {
    match *point {
        SpectralPoint::OffCut(z) => {
            if z.im == 0.0 && z.re > PI {
                let ph = phi_principal(z).re;
                return Ok(C64::new((ph / PI).atan() / PI, 0.0));
            }
            if z.im == 0.0 && z.re == -PI {
                return Ok(C64::new(1.0, 0.0));
            }
            let q = q_of(point)?;
            let a = q.arg();
            // arg in (0, 2π): 2π - arg = -a when the principal value is <= 0
            let re = if a <= 0.0 { -a } else { 2.0 * PI - a };
            Ok(C64::new(re, q.norm().ln()) / PI)
        }
        SpectralPoint::Boundary { .. } => {
            let k = branch_k(point)?;
            Ok(C64::new(2.0, 0.0) + C64::i() * k)
        }
    }
}

/// `ρ` as a function of `w = ln u` for the exponent `κ = i𝐤`.
fn rho_kappa(w: f64, kappa: C64) -> C64 {
    let w = w.abs();
    if w < SERIES_W {
        let k2 = kappa * kappa;
        let k3 = k2 * kappa;
        let w2 = w * w;
        let c2 = k3 / 12.0 + k2 / 4.0 + kappa / 6.0;
        let c4 = k3 * k2 / 240.0 + k2 * k2 / 48.0 + k3 / 36.0 - kappa / 90.0;
        return -(kappa + 1.0 + 2.0 * w2 * (c2 + w2 * c4));
    }
    ((-(kappa + 2.0) * w).exp() - (kappa * w).exp()) / (-(-2.0 * w).exp_m1())
}

fn check_u(u: f64) -> Result<f64> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::domain("u", format!("{u} must be positive and finite")));
    }
    Ok(u.ln())
}

/// `ρ(u; z) = u^{i𝐤}/(u⁻² - 1) + u^{-i𝐤}/(u² - 1)`, with `ρ(1; z) = -1 - i𝐤`.
pub fn rho(u: f64, point: &SpectralPoint) -> Result<C64> {
    let w = check_u(u)?;
    let kappa = C64::i() * branch_k(point)?;
    Ok(rho_kappa(w, kappa))
}

/// `w coth w`, even and equal to 1 at 0.
pub fn w_coth_w(w: f64) -> f64 {
    if w.abs() < SERIES_W {
        let w2 = w * w;
        1.0 + w2 / 3.0 - w2 * w2 / 45.0
    } else {
        w / w.tanh()
    }
}

/// `sin(kw)/sinh(w)`, continuous at `w = 0`.
fn sin_over_sinh(k: f64, w: f64) -> f64 {
    if w.abs() < SERIES_W {
        let w2 = w * w;
        let k2 = k * k;
        k * (1.0 - (k2 + 1.0) * w2 / 6.0 + (k2 * k2 / 120.0 + k2 / 36.0 + 7.0 / 360.0) * w2 * w2)
    } else {
        (k * w).sin() / w.sinh()
    }
}

/// The resolvent kernel of `C` in log coordinates: `â(x, y) = e^{(x+y)/2} a(e^x, e^y)`
/// depends on `w = x - y` only. Construct once per spectral point and evaluate at many `w`.
#[derive(Debug, Clone, Copy)]
pub struct LogResolventKernel {
    form: KernelForm,
}

#[derive(Debug, Clone, Copy)]
enum KernelForm {
    Generic { kappa: C64, inv_phi: C64 },
    RealNegative { k: f64, inv_root: f64 },
    MinusPi,
}

impl LogResolventKernel {
    pub fn new(point: &SpectralPoint) -> Result<Self> {
        Self::with_margin(point, LAMBDA_MIN)
    }

    pub fn with_margin(point: &SpectralPoint, lambda_min: f64) -> Result<Self> {
        let real_negative = match *point {
            SpectralPoint::OffCut(z) => z.im == 0.0 && z.re >= -PI && z.re < 0.0,
            SpectralPoint::Boundary { lambda, .. } => lambda < 0.0,
        };
        if real_negative {
            let lambda = point.z().re;
            if lambda == -PI {
                return Ok(Self { form: KernelForm::MinusPi });
            }
            let l = lambda.abs();
            let root = ((PI - l) * (PI + l)).sqrt();
            return Ok(Self {
                form: KernelForm::RealNegative { k: k_of_lambda(l)?, inv_root: 1.0 / root },
            });
        }
        if let SpectralPoint::Boundary { lambda, .. } = *point {
            if lambda < lambda_min || lambda > PI - lambda_min {
                return Err(Error::Edge { lambda, margin: lambda_min });
            }
        }
        let kappa = C64::i() * branch_k(point)?;
        let inv_phi = phi(point)?.inv();
        Ok(Self { form: KernelForm::Generic { kappa, inv_phi } })
    }

    /// `â(w) = ρ(e^w; z) / φ(z)`.
    pub fn eval(&self, w: f64) -> C64 {
        match self.form {
            KernelForm::Generic { kappa, inv_phi } => rho_kappa(w, kappa) * inv_phi,
            KernelForm::RealNegative { k, inv_root } => {
                C64::new(-sin_over_sinh(k, w) * inv_root, 0.0)
            }
            KernelForm::MinusPi => C64::new(-1.0 / (PI * PI * sinh_over_w(w)), 0.0),
        }
    }
}

fn sinh_over_w(w: f64) -> f64 {
    if w.abs() < SERIES_W {
        let w2 = w * w;
        1.0 + w2 / 6.0 + w2 * w2 / 120.0
    } else {
        w.sinh() / w
    }
}

/// The resolvent kernel `a(t, s; z)`, with `R(z) = -z⁻¹(I + A(z))`.
pub fn resolvent_kernel(t: f64, s: f64, point: &SpectralPoint) -> Result<C64> {
    let x = check_u(t)?;
    let y = check_u(s)?;
    let ker = LogResolventKernel::new(point)?;
    Ok(ker.eval(x - y) / (t * s).sqrt())
}

/// Kernel of `dE(λ)/dλ`, for `0 < λ < π`.
pub fn spectral_density(t: f64, s: f64, lambda: f64) -> Result<f64> {
    spectral_density_with_margin(t, s, lambda, LAMBDA_MIN)
}

pub fn spectral_density_with_margin(t: f64, s: f64, lambda: f64, lambda_min: f64) -> Result<f64> {
    let x = check_u(t)?;
    let y = check_u(s)?;
    if !(lambda > 0.0 && lambda < PI) {
        return Err(Error::domain("lambda", format!("{lambda} not in (0, pi)")));
    }
    if lambda < lambda_min || lambda > PI - lambda_min {
        return Err(Error::Edge { lambda, margin: lambda_min });
    }
    let k = k_of_lambda(lambda)?;
    let root = ((PI - lambda) * (PI + lambda)).sqrt();
    Ok((k * (x - y)).cos() / (PI * lambda * root * (t * s).sqrt()))
}

/// `σ_n(u)`: `lnⁿu` for even `n`, `(1+u²)/(1-u²) lnⁿu` for odd `n`.
pub fn sigma_n(n: usize, u: f64) -> Result<f64> {
    let w = check_u(u)?;
    Ok(sigma_n_log(n, w))
}

pub(crate) fn sigma_n_log(n: usize, w: f64) -> f64 {
    if n % 2 == 0 {
        w.powi(n as i32)
    } else {
        -w_coth_w(w) * w.powi(n as i32 - 1)
    }
}

/// Truncated expansion of `a(t, s; z)` around the resonance at `z = π`:
/// `φ⁻¹ (ts)^{-1/2} Σ_{n ≤ N} θⁿ/n! σ_n(t/s)`.
pub fn resonance_series(t: f64, s: f64, point: &SpectralPoint, order: usize) -> Result<C64> {
    if order > MAX_SERIES_ORDER {
        return Err(Error::domain(
            "order",
            format!("{order} exceeds {MAX_SERIES_ORDER}"),
        ));
    }
    let x = check_u(t)?;
    let y = check_u(s)?;
    let w = x - y;
    let th = theta(point)?;
    let inv_phi = phi(point)?.inv();
    let mut sum = C64::new(0.0, 0.0);
    let mut pow = C64::new(1.0, 0.0);
    let mut fact = 1.0;
    for n in 0..=order {
        if n > 0 {
            pow *= th;
            fact *= n as f64;
        }
        sum += pow / fact * sigma_n_log(n, w);
    }
    Ok(sum * inv_phi / (t * s).sqrt())
}

/// Leading behaviour of `a(t, s; λ)` as `λ → 0⁻`.
pub fn zero_energy_kernel(t: f64, s: f64, lambda: f64) -> Result<f64> {
    let x = check_u(t)?;
    let y = check_u(s)?;
    if !(lambda < 0.0 && lambda > -PI) {
        return Err(Error::domain("lambda", format!("{lambda} not in (-pi, 0)")));
    }
    if t == s {
        return Err(Error::domain("t", "t = s".to_string()));
    }
    let root = ((PI - lambda.abs()) * (PI + lambda.abs())).sqrt();
    let c = (lambda.abs() / (2.0 * PI)).ln() / PI;
    // √(ts)/(t² - s²) = 1/(2 sinh w) in w = ln(t/s)
    Ok(sin_over_sinh(c, x - y) / (root * (t * s).sqrt()))
}
