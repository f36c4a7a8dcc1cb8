//! Eigenvalues of `H = C + V` above the continuous spectrum `[0, π]`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::grid::LogGrid;
use crate::linalg::{psd_sqrt, symmetrize};
use crate::mellin::carleman_matrix;
use crate::perturbation::PerturbationKernel;
use crate::spectral::w_coth_w;

#[derive(Debug, Clone)]
pub struct CountConfig {
    /// Grid for the Birman–Schwinger operator; chosen from the kernel's support when `None`.
    pub grid: Option<LogGrid>,
    pub step: f64,
    pub support_tol: f64,
    /// Relative size of negative eigenvalues of `V` that are rounded to zero.
    pub clip: f64,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig { grid: None, step: 0.2, support_tol: 1e-14, clip: 1e-10 }
    }
}

impl CountConfig {
    pub fn grid_for(&self, kernel: &PerturbationKernel) -> Result<LogGrid> {
        if let Some(g) = &self.grid {
            return Ok(g.clone());
        }
        let (lo, hi) = kernel.log_support(self.support_tol);
        LogGrid::covering(lo - 2.0, hi + 2.0, self.step)
    }
}

/// `θ(λ) = π⁻¹ arctan(φ/π)` and `φ(λ) = (λ² - π²)^{1/2}` for `λ > π`.
fn theta_phi(lambda: f64) -> (f64, f64) {
    let ph = ((lambda - PI) * (lambda + PI)).sqrt();
    ((ph / PI).atan() / PI, ph)
}

/// Kernel of `Ã(λ) = A(λ) - φ⁻¹(·, ψ₀)ψ₀` in log coordinates, `(ρ(e^w; λ) - 1)/φ(λ)`,
/// for real `λ > π`.
pub fn a_tilde_log(w: f64, lambda: f64) -> f64 {
    let (th, ph) = theta_phi(lambda);
    rho_tilde(w, th) / ph
}

fn rho_tilde(w: f64, th: f64) -> f64 {
    let w = w.abs();
    if w == 0.0 {
        return -th;
    }
    if w > 700.0 {
        return -1.0;
    }
    (th * w).exp_m1() / -(2.0 * w).exp_m1() + (-th * w).exp_m1() / -(-2.0 * w).exp_m1()
}

/// The limit of [`a_tilde_log`] as `λ ↓ π`: `π⁻² σ₁(e^w) = -π⁻² w coth w`.
pub fn a_tilde_limit_log(w: f64) -> f64 {
    -w_coth_w(w) / (PI * PI)
}

/// The Birman–Schwinger operator `B(λ) = λ⁻¹(V + V^{1/2} A(λ) V^{1/2})` for `λ > π`, split as
/// `(λφ)⁻¹ (·, w) w + λ⁻¹(V + V^{1/2} Ã(λ) V^{1/2})` with `w = V^{1/2} ψ₀`.
#[derive(Debug, Clone)]
pub struct BirmanSchwinger {
    pub lambda: f64,
    pub matrix: DMatrix<f64>,
    /// `‖w‖² = (V ψ₀, ψ₀)` on the grid.
    pub w_norm_sq: f64,
}

impl BirmanSchwinger {
    pub fn new(kernel: &PerturbationKernel, lambda: f64, grid: &LogGrid, clip: f64) -> Result<Self> {
        if !(lambda > PI) || !lambda.is_finite() {
            return Err(Error::domain("lambda", format!("{lambda} must exceed pi")));
        }
        let v = kernel.assemble(grid)?;
        let s = psd_sqrt(&v, clip)?;
        Self::from_parts(&v, &s, lambda, grid)
    }

    fn from_parts(v: &DMatrix<f64>, s: &DMatrix<f64>, lambda: f64, grid: &LogGrid) -> Result<Self> {
        let n = grid.len();
        let h = grid.step();
        let (th, ph) = theta_phi(lambda);
        let at = DMatrix::from_fn(n, n, |i, j| h * rho_tilde((i as f64 - j as f64) * h, th) / ph);
        let w = s * DVector::from_element(n, 1.0);
        let mut b = (v + s * at * s) / lambda + (&w * w.transpose()) * (h / (lambda * ph));
        symmetrize(&mut b);
        Ok(BirmanSchwinger { lambda, matrix: b, w_norm_sq: h * w.norm_squared() })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().cloned().collect();
        e.sort_by(|a, b| b.partial_cmp(a).unwrap());
        e
    }

    /// Number of eigenvalues of `H` in `(λ, ∞)`: eigenvalues of `B(λ)` above 1.
    pub fn count(&self) -> usize {
        self.eigenvalues().iter().filter(|&&e| e > 1.0).count()
    }
}

/// `N(λ)`, the number of eigenvalues of `C + V` above `λ > π`, by Birman–Schwinger.
pub fn birman_schwinger_count(kernel: &PerturbationKernel, lambda: f64, cfg: &CountConfig) -> Result<usize> {
    let grid = cfg.grid_for(kernel)?;
    Ok(BirmanSchwinger::new(kernel, lambda, &grid, cfg.clip)?.count())
}

/// Counts for several thresholds sharing one square root of `V`.
pub fn birman_schwinger_counts(
    kernel: &PerturbationKernel,
    lambdas: &[f64],
    cfg: &CountConfig,
) -> Result<Vec<usize>> {
    let grid = cfg.grid_for(kernel)?;
    let v = kernel.assemble(&grid)?;
    let s = psd_sqrt(&v, cfg.clip)?;
    lambdas
        .iter()
        .map(|&l| {
            if !(l > PI) {
                return Err(Error::domain("lambda", format!("{l} must exceed pi")));
            }
            Ok(BirmanSchwinger::from_parts(&v, &s, l, &grid)?.count())
        })
        .collect()
}

/// Eigenvalues of the discretized `C + V` above a threshold.
#[derive(Debug, Clone)]
pub struct DirectCount {
    pub threshold: f64,
    pub eigenvalues: Vec<f64>,
    /// Largest fraction of an eigenvector's mass in the outer 5% of the window.
    pub edge_mass: f64,
}

impl DirectCount {
    pub fn count(&self) -> usize {
        self.eigenvalues.len()
    }
}

const EDGE_MASS_TOL: f64 = 1e-3;

/// Diagonalizes `C + V` on the grid and counts eigenvalues above `threshold`,
/// refusing the count if any counted eigenvector reaches the window edges.
pub fn count_direct(kernel: &PerturbationKernel, threshold: f64, grid: &LogGrid) -> Result<DirectCount> {
    let mut m = carleman_matrix(grid) + kernel.assemble(grid)?;
    symmetrize(&mut m);
    let eig = SymmetricEigen::new(m);
    let n = grid.len();
    let edge = (n / 20).max(1);
    let mut eigenvalues = Vec::new();
    let mut edge_mass: f64 = 0.0;
    for (j, &e) in eig.eigenvalues.iter().enumerate() {
        if e > threshold {
            eigenvalues.push(e);
            let col = eig.eigenvectors.column(j);
            let outer: f64 = (0..edge).chain(n - edge..n).map(|i| col[i] * col[i]).sum();
            edge_mass = edge_mass.max(outer / col.norm_squared());
        }
    }
    eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if edge_mass > EDGE_MASS_TOL {
        return Err(Error::GridTooSmall(format!(
            "bound state carries {edge_mass:e} of its mass at the window edges"
        )));
    }
    Ok(DirectCount { threshold, eigenvalues, edge_mass })
}

/// Eigenvalues of `C + V` on a grid, without eigenvectors.
pub fn direct_eigenvalues(kernel: &PerturbationKernel, grid: &LogGrid) -> Result<Vec<f64>> {
    let mut m = carleman_matrix(grid) + kernel.assemble(grid)?;
    symmetrize(&mut m);
    let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().cloned().collect();
    e.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(e)
}

/// Direct counts certified by agreement on the grid, its refinement and a
/// window widened by half.
pub fn count_direct_certified(
    kernel: &PerturbationKernel,
    thresholds: &[f64],
    grid: &LogGrid,
) -> Result<Vec<usize>> {
    let base: Vec<usize> = {
        let lowest = thresholds.iter().cloned().fold(f64::INFINITY, f64::min);
        let dc = count_direct(kernel, lowest, grid)?;
        thresholds.iter().map(|&t| dc.eigenvalues.iter().filter(|&&e| e > t).count()).collect()
    };
    for other in [grid.refined(), grid.widened(1.5)] {
        let e = direct_eigenvalues(kernel, &other)?;
        for (i, &t) in thresholds.iter().enumerate() {
            let c = e.iter().filter(|&&v| v > t).count();
            if c != base[i] {
                return Err(Error::NotConverged(format!(
                    "direct count above {t} is {} on the base grid but {c} on a {}-node grid",
                    base[i],
                    other.len()
                )));
            }
        }
    }
    Ok(base)
}

/// Double-exponential nodes for `∫_{-π/2}^{π/2} dθ`, stored as
/// `(tan θ, ln cos θ, θ, ln weight)`.
fn de_nodes(hs: f64) -> Vec<(f64, f64, f64, f64)> {
    let m = (6.0 / hs).round() as i64;
    (-m..=m)
        .map(|i| {
            let s = i as f64 * hs;
            let u = 0.5 * PI * s.sinh();
            let au = u.abs();
            // δ = π/2 - |θ| = π / (e^{2|u|} + 1)
            let delta = PI / ((2.0 * au).exp() + 1.0);
            let log_delta = PI.ln() - 2.0 * au - (-2.0 * au).exp().ln_1p();
            let sign = u.signum();
            let theta = sign * (0.5 * PI - delta);
            let tan = sign / delta.tan();
            let log_cos = if delta < 1e-8 { log_delta } else { delta.sin().ln() };
            let log_sech2 = 2.0 * (2f64.ln() - au - (-2.0 * au).exp().ln_1p());
            let log_w = hs.ln() + (0.25 * PI * PI * s.cosh()).ln() + log_sech2;
            (tan, log_cos, theta, log_w)
        })
        .collect()
}

/// `∬ ⟨x⟩^{-2α} d(x - y)² ⟨y⟩^{-2α} dx dy` for `|d(w)| ≲ 1 + |w|`, via tanh–sinh in `x = tan θ`.
fn weighted_toeplitz_hs_sq<D: Fn(f64) -> f64>(alpha: f64, d: D, hs: f64) -> f64 {
    let nodes = de_nodes(hs);
    let lw: Vec<f64> = nodes.iter().map(|n| n.3 + (2.0 * alpha - 4.0) * n.1).collect();
    let mut total = 0.0;
    for (i, a) in nodes.iter().enumerate() {
        for (j, b) in nodes.iter().enumerate() {
            let w = a.0 - b.0;
            let g = d(w) / 1f64.hypot(w);
            if g == 0.0 || !g.is_finite() {
                continue;
            }
            // (1 + w²) cos²θ₁ cos²θ₂ = cos²θ₁ cos²θ₂ + sin²(θ₁ - θ₂)
            let c = (2.0 * (a.1 + b.1)).exp();
            let sn = sin_diff(a, b);
            let e = lw[i] + lw[j] + (c + sn * sn).ln() + 2.0 * g.abs().ln();
            total += e.exp();
        }
    }
    total
}

fn sin_diff(a: &(f64, f64, f64, f64), b: &(f64, f64, f64, f64)) -> f64 {
    let da = 0.5 * PI - a.2.abs();
    let db = 0.5 * PI - b.2.abs();
    if a.2.signum() == b.2.signum() {
        (a.2.signum() * (db - da)).sin()
    } else {
        a.2.signum() * (da + db).sin()
    }
}

/// `γ_α = π⁻² (∬ ⟨x⟩^{-2α} (w coth w)² ⟨y⟩^{-2α} dx dy)^{1/2}`, `w = x - y`, for `α > 3/2`.
pub fn gamma_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 1.5) || !alpha.is_finite() {
        return Err(Error::domain("alpha", format!("{alpha} must exceed 3/2")));
    }
    let coarse = weighted_toeplitz_hs_sq(alpha, w_coth_w, 1.0 / 16.0);
    let fine = weighted_toeplitz_hs_sq(alpha, w_coth_w, 1.0 / 32.0);
    if (fine - coarse).abs() > 1e-6 * fine {
        return Err(Error::NotConverged(format!("gamma_alpha quadrature: {coarse} vs {fine}")));
    }
    Ok(fine.sqrt() / (PI * PI))
}

/// `‖Q^{-α}(Ã(λ) - Ã(π))Q^{-α}‖₂` with `Q = ⟨ln t⟩`, for `λ > π`.
pub fn a_tilde_limit_defect(alpha: f64, lambda: f64) -> Result<f64> {
    if !(alpha > 1.5) {
        return Err(Error::domain("alpha", format!("{alpha} must exceed 3/2")));
    }
    if !(lambda > PI) {
        return Err(Error::domain("lambda", format!("{lambda} must exceed pi")));
    }
    let (th, ph) = theta_phi(lambda);
    let d = move |w: f64| {
        if w.abs() > 700.0 {
            -1.0 / ph + w.abs() / (PI * PI)
        } else {
            rho_tilde(w, th) / ph - a_tilde_limit_log(w)
        }
    };
    Ok(weighted_toeplitz_hs_sq(alpha, d, 1.0 / 32.0).sqrt())
}

/// Bound `N ≤ π⁻² (‖V₊‖₂ + γ_α ‖Q^α V₊ Q^α‖)² + 1` on the number of eigenvalues above π.
pub fn eigenvalue_bound(kernel: &PerturbationKernel, alpha: f64, grid: &LogGrid) -> Result<f64> {
    let g = gamma_alpha(alpha)?;
    kernel.weighted_hs_norm(alpha, grid)?;
    let vp = kernel.assemble_positive(grid)?;
    let hs = vp.norm();
    let weighted = kernel.weighted_operator_norm(alpha, grid)?;
    Ok((hs + g * weighted).powi(2) / (PI * PI) + 1.0)
}

/// `‖w‖² = (V ψ₀, ψ₀) = ∬ v(t,s) (ts)^{-1/2} dt ds`.
pub fn resonance_weight(kernel: &PerturbationKernel, grid: &LogGrid) -> Result<f64> {
    let n = grid.len();
    let h = grid.step();
    let xs = grid.nodes();
    let edge = (n / 100).max(1);
    let (mut total, mut outer) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let v = kernel.eval_log(xs[i], xs[j]);
            total += v;
            if i < edge || j < edge || i >= n - edge || j >= n - edge {
                outer += v.abs();
            }
        }
    }
    if !total.is_finite() || outer > 1e-10 * total.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Divergent("resonance weight integrand does not decay in the window".into()));
    }
    Ok(total * h * h)
}

/// `‖w‖² = π ∫ v(t) dt` for a Hankel kernel `v(t + s)`.
pub fn resonance_weight_hankel(kernel: &PerturbationKernel, grid: &LogGrid) -> Result<f64> {
    if !kernel.is_hankel() {
        return Err(Error::domain("kernel", "not a Hankel kernel"));
    }
    let n = grid.len();
    let vals: Vec<f64> = (0..n)
        .map(|i| {
            let x = grid.x(i);
            kernel.eval(x.exp(), 0.0) * x.exp()
        })
        .collect();
    let total: f64 = vals.iter().sum();
    let outer: f64 = vals[..(n / 100).max(1)].iter().chain(&vals[n - (n / 100).max(1)..]).map(|v| v.abs()).sum();
    if !total.is_finite() || outer > 1e-10 * total.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Divergent("integral of v does not converge in the window".into()));
    }
    Ok(PI * total * grid.step())
}

/// Birman–Schwinger count together with the direct count and the a-priori bound.
#[derive(Debug, Clone)]
pub struct BirmanSchwingerReport {
    pub lambda: f64,
    pub count_bs: usize,
    pub count_direct: Option<usize>,
    pub bound: Option<f64>,
    pub w_norm_sq: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_tilde_limits() {
        let lambda = PI + 1e-9;
        for &w in &[0.0, 1e-4, 0.5, 3.0, -2.0] {
            assert!((a_tilde_log(w, lambda) - a_tilde_limit_log(w)).abs() < 1e-3);
        }
        assert!((rho_tilde(1e-9, 0.1) + 0.1).abs() < 1e-8);
    }

    #[test]
    fn gamma_alpha_rejects_small_alpha() {
        assert!(gamma_alpha(1.5).is_err());
        assert!(gamma_alpha(1.0).is_err());
    }
}
