//! Scattering for `H = C + V`: Lippmann–Schwinger eigenfunctions, the scattering
//! matrix and its stationary representation.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::LogGrid;
use crate::linalg::{condition_number, to_complex, Toeplitz};
use crate::perturbation::PerturbationKernel;
use crate::spectral::{dispersion, LogResolventKernel, Side, SpectralPoint, LAMBDA_MIN};

#[derive(Debug, Clone)]
pub struct ScatteringConfig {
    /// Window on which the Lippmann–Schwinger system is solved; chosen from the
    /// kernel's support when `None`.
    pub solve_grid: Option<LogGrid>,
    /// Grid on which eigenfunctions are tabulated; `[-80, 80]` with step 0.25 when `None`.
    pub table_grid: Option<LogGrid>,
    /// Step of the automatic solve grid.
    pub step: f64,
    /// Relative size below which the kernel counts as negligible for the automatic window.
    pub support_tol: f64,
    pub cond_cap: f64,
    pub lambda_min: f64,
    /// Fraction of the table grid used at each end for the plane-wave fits.
    pub fit_fraction: f64,
    pub fit_tol: f64,
}

impl Default for ScatteringConfig {
    fn default() -> Self {
        ScatteringConfig {
            solve_grid: None,
            table_grid: None,
            step: 0.1,
            support_tol: 1e-14,
            cond_cap: 1e10,
            lambda_min: LAMBDA_MIN,
            fit_fraction: 0.15,
            fit_tol: 1e-6,
        }
    }
}

impl ScatteringConfig {
    pub fn solve_grid_for(&self, kernel: &PerturbationKernel) -> Result<LogGrid> {
        if let Some(g) = &self.solve_grid {
            return Ok(g.clone());
        }
        let (lo, hi) = kernel.log_support(self.support_tol);
        LogGrid::covering(lo - 2.0, hi + 2.0, self.step)
    }

    pub fn table_grid(&self) -> LogGrid {
        self.table_grid
            .clone()
            .unwrap_or_else(|| LogGrid::new(-80.0, 80.0, 641).expect("valid grid"))
    }
}

fn lambda_checked(k: f64, lambda_min: f64) -> Result<f64> {
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::domain("k", format!("{k} must be positive")));
    }
    let lambda = dispersion(k);
    if lambda < lambda_min || lambda > PI - lambda_min {
        return Err(Error::Edge { lambda, margin: lambda_min });
    }
    Ok(lambda)
}

/// `γ(k) = cosh²(πk) / (π² sinh(πk)) = 1/|λ'(k)|`.
pub fn gamma_factor(k: f64) -> f64 {
    let a = PI * k;
    a.cosh() / (PI * PI * a.tanh())
}

/// Nyström matrix of `R₀(z) = -z⁻¹(I + A(z))` on the grid.
pub fn resolvent_matrix(point: &SpectralPoint, grid: &LogGrid) -> Result<DMatrix<C64>> {
    resolvent_matrix_with_margin(point, grid, LAMBDA_MIN)
}

pub fn resolvent_matrix_with_margin(
    point: &SpectralPoint,
    grid: &LogGrid,
    lambda_min: f64,
) -> Result<DMatrix<C64>> {
    let ker = LogResolventKernel::with_margin(point, lambda_min)?;
    let h = grid.step();
    let a = Toeplitz::from_fn(grid.len(), |d| ker.eval(d as f64 * h) * h);
    let mut m = a.to_dense();
    for i in 0..grid.len() {
        m[(i, i)] += 1.0;
    }
    let inv_z = -point.z().inv();
    Ok(m * inv_z)
}

/// `R₀(λ ± i0)` for `0 < λ < π`.
pub fn limiting_absorption_resolvent(lambda: f64, side: Side, grid: &LogGrid) -> Result<DMatrix<C64>> {
    if !(lambda > 0.0 && lambda < PI) {
        return Err(Error::domain("lambda", format!("{lambda} not in (0, pi)")));
    }
    resolvent_matrix(&SpectralPoint::boundary(lambda, side)?, grid)
}

/// Plane-wave coefficients `g ≈ plus e^{ikx} + minus e^{-ikx}` at one end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveFit {
    pub plus: C64,
    pub minus: C64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticCoefficients {
    /// Fits as `t → 0` for `ψ₁`, `ψ₂`.
    pub left: [PlaneWaveFit; 2],
    /// Fits as `t → ∞` for `ψ₁`, `ψ₂`.
    pub right: [PlaneWaveFit; 2],
}

impl AsymptoticCoefficients {
    /// Scattering entries read off the asymptotics: `s₁₁, s₁₂` from `ψ₁`, `s₂₁, s₂₂` from `ψ₂`.
    pub fn scattering_entries(&self) -> [[C64; 2]; 2] {
        [
            [self.left[0].plus, self.right[0].minus],
            [self.left[1].plus, self.right[1].minus],
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.left.iter().chain(&self.right).map(|f| f.residual).fold(0.0, f64::max)
    }
}

/// Solutions `ψ_j = ψ_j⁰ - R₀(λ ± i0) V ψ_j` with `ψ₁⁰ = t^{-1/2+ik}`, `ψ₂⁰ = t^{-1/2-ik}`,
/// in log representation.
#[derive(Debug, Clone)]
pub struct EigenfunctionTable {
    pub k: f64,
    pub lambda: f64,
    pub side: Side,
    pub grid: LogGrid,
    pub psi: [Vec<C64>; 2],
    pub solve_grid: LogGrid,
    /// `ψ_j` on the solve grid.
    pub psi_solve: [Vec<C64>; 2],
    /// `V ψ_j` on the solve grid.
    pub density: [Vec<C64>; 2],
    pub ls_residual: f64,
    pub condition: f64,
    /// Bound on the part of `V ψ` lost by truncating the kernel to the solve window.
    pub tail_bound: f64,
    pub coefficients: Option<AsymptoticCoefficients>,
}

/// Solves the Lippmann–Schwinger equation at `λ(k) + i0` (`Side::Plus`) or `λ(k) - i0`.
pub fn solve_lippmann_schwinger(
    kernel: &PerturbationKernel,
    k: f64,
    side: Side,
    cfg: &ScatteringConfig,
) -> Result<EigenfunctionTable> {
    let lambda = lambda_checked(k, cfg.lambda_min)?;
    let grid = cfg.solve_grid_for(kernel)?;
    let n = grid.len();
    let h = grid.step();
    let xs = grid.nodes();
    let v = kernel.assemble(&grid)?;
    let point = SpectralPoint::boundary(lambda, side)?;
    let r0 = resolvent_matrix_with_margin(&point, &grid, cfg.lambda_min)?;
    let vc = to_complex(&v);
    let mut m = &r0 * &vc;
    for i in 0..n {
        m[(i, i)] += 1.0;
    }
    let condition = condition_number(&m);
    if !(condition <= cfg.cond_cap) {
        return Err(Error::IllConditioned { cond: condition, cap: cfg.cond_cap });
    }
    let lu = m.clone().lu();
    let mut psi_solve: [Vec<C64>; 2] = [Vec::new(), Vec::new()];
    let mut density: [Vec<C64>; 2] = [Vec::new(), Vec::new()];
    let mut ls_residual: f64 = 0.0;
    for (j, sign) in [1.0, -1.0].into_iter().enumerate() {
        let rhs = DVector::from_iterator(n, xs.iter().map(|&x| C64::from_polar(1.0, sign * k * x)));
        let sol = lu.solve(&rhs).ok_or_else(|| Error::Singular("Lippmann-Schwinger matrix".into()))?;
        let res = (&m * &sol - &rhs).norm() / rhs.norm();
        ls_residual = ls_residual.max(res);
        density[j] = (&vc * &sol).iter().cloned().collect();
        psi_solve[j] = sol.iter().cloned().collect();
    }

    let tail_bound = truncation_tail(kernel, &grid);

    let table = cfg.table_grid();
    let ker = LogResolventKernel::with_margin(&point, cfg.lambda_min)?;
    let mut psi: [Vec<C64>; 2] = [Vec::new(), Vec::new()];
    for (j, sign) in [1.0, -1.0].into_iter().enumerate() {
        psi[j] = (0..table.len())
            .map(|i| {
                let x = table.x(i);
                let inside = x >= grid.x_min() && x <= grid.x_max();
                let mut u_x = C64::new(0.0, 0.0);
                if inside {
                    for (l, &y) in xs.iter().enumerate() {
                        u_x += psi_solve[j][l] * (h * kernel.eval_log(x, y));
                    }
                }
                let mut conv = C64::new(0.0, 0.0);
                for (l, &y) in xs.iter().enumerate() {
                    conv += ker.eval(x - y) * density[j][l];
                }
                // ψ = ψ⁰ - R₀ u = ψ⁰ + λ⁻¹ (u + A u)
                C64::from_polar(1.0, sign * k * x) + (u_x + conv * h) / lambda
            })
            .collect();
    }

    Ok(EigenfunctionTable {
        k,
        lambda,
        side,
        grid: table,
        psi,
        solve_grid: grid,
        psi_solve,
        density,
        ls_residual,
        condition,
        tail_bound,
        coefficients: None,
    })
}

/// Largest row sum of `|v̂|` over a 20-unit band just outside the window, relative to inside.
fn truncation_tail(kernel: &PerturbationKernel, grid: &LogGrid) -> f64 {
    let h = grid.step();
    let xs = grid.nodes();
    let m = (20.0 / h).ceil() as usize;
    let outside: Vec<f64> = (1..=m)
        .flat_map(|i| [grid.x_min() - i as f64 * h, grid.x_max() + i as f64 * h])
        .collect();
    let mut inside_max: f64 = 0.0;
    let mut tail_max: f64 = 0.0;
    for &x in &xs {
        let inside: f64 = xs.iter().map(|&y| kernel.eval_log(x, y).abs()).sum::<f64>() * h;
        let tail: f64 = outside.iter().map(|&y| kernel.eval_log(x, y).abs()).sum::<f64>() * h;
        inside_max = inside_max.max(inside);
        tail_max = tail_max.max(tail);
    }
    if inside_max == 0.0 {
        0.0
    } else {
        tail_max / inside_max
    }
}

/// The scattering matrix with entries named as `s₁₁ = 1 - iγ∫ e^{-ikx} Vψ₁` (the
/// `t → 0` coefficient of `ψ₁`), `s₁₂ = -iγ∫ e^{ikx} Vψ₁` (the `t → ∞` reflected
/// coefficient of `ψ₁`), and likewise `s₂₁`, `s₂₂` from `ψ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringMatrix {
    pub k: f64,
    pub s: [[C64; 2]; 2],
}

impl ScatteringMatrix {
    pub fn s11(&self) -> C64 {
        self.s[0][0]
    }
    pub fn s12(&self) -> C64 {
        self.s[0][1]
    }
    pub fn s21(&self) -> C64 {
        self.s[1][0]
    }
    pub fn s22(&self) -> C64 {
        self.s[1][1]
    }

    pub fn to_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(2, 2, |i, j| self.s[i][j])
    }

    /// `‖S*S - I‖` in the Frobenius norm.
    pub fn unitarity_defect(&self) -> f64 {
        let s = self.to_matrix();
        (s.adjoint() * &s - DMatrix::identity(2, 2)).norm()
    }

    /// The matrix acting on `(f̃(k), f̃(-k))` on the energy shell; it is the
    /// transpose of the entry layout above.
    pub fn operator_form(&self) -> [[C64; 2]; 2] {
        [[self.s[0][0], self.s[1][0]], [self.s[0][1], self.s[1][1]]]
    }
}

/// `S(k)` from the quadratures of `Vψ_j` over the solve window.
pub fn scattering_matrix_from_table(table: &EigenfunctionTable) -> ScatteringMatrix {
    let k = table.k;
    let g = gamma_factor(k);
    let h = table.solve_grid.step();
    let xs = table.solve_grid.nodes();
    let proj = |u: &[C64], sign: f64| -> C64 {
        xs.iter().zip(u).map(|(&x, v)| C64::from_polar(1.0, sign * k * x) * v).sum::<C64>() * h
    };
    let mig = C64::new(0.0, -g);
    let one = C64::new(1.0, 0.0);
    let s11 = one + mig * proj(&table.density[0], -1.0);
    let s12 = mig * proj(&table.density[0], 1.0);
    let s21 = mig * proj(&table.density[1], -1.0);
    let s22 = one + mig * proj(&table.density[1], 1.0);
    ScatteringMatrix { k, s: [[s11, s12], [s21, s22]] }
}

pub fn scattering_matrix(kernel: &PerturbationKernel, k: f64, cfg: &ScatteringConfig) -> Result<ScatteringMatrix> {
    let table = solve_lippmann_schwinger(kernel, k, Side::Plus, cfg)?;
    Ok(scattering_matrix_from_table(&table))
}

/// `S = I - 2πi Γ₀ (V - V R(λ+i0) V) Γ₀*` assembled directly, returned in the
/// entry layout of [`ScatteringMatrix`].
pub fn stationary_scattering_matrix(
    kernel: &PerturbationKernel,
    k: f64,
    cfg: &ScatteringConfig,
) -> Result<ScatteringMatrix> {
    let lambda = lambda_checked(k, cfg.lambda_min)?;
    let grid = cfg.solve_grid_for(kernel)?;
    let n = grid.len();
    let h = grid.step();
    let v = to_complex(&kernel.assemble(&grid)?);
    let r0 = resolvent_matrix_with_margin(&SpectralPoint::boundary(lambda, Side::Plus)?, &grid, cfg.lambda_min)?;
    let mut m = &r0 * &v;
    for i in 0..n {
        m[(i, i)] += 1.0;
    }
    let condition = condition_number(&m);
    if !(condition <= cfg.cond_cap) {
        return Err(Error::IllConditioned { cond: condition, cap: cfg.cond_cap });
    }
    let r = m.lu().solve(&r0).ok_or_else(|| Error::Singular("resolvent".into()))?;
    let f = &v - &v * r * &v;
    let e = shell_vectors(&grid, k);
    let g = gamma_factor(k);
    let mut op = [[C64::new(0.0, 0.0); 2]; 2];
    for (j, ej) in e.iter().enumerate() {
        for (l, el) in e.iter().enumerate() {
            let fe = &f * el;
            let delta = if j == l { 1.0 } else { 0.0 };
            op[j][l] = C64::new(delta, 0.0) - C64::new(0.0, g) * ej.dotc(&fe) * h;
        }
    }
    Ok(ScatteringMatrix { k, s: [[op[0][0], op[1][0]], [op[0][1], op[1][1]]] })
}

fn shell_vectors(grid: &LogGrid, k: f64) -> [DVector<C64>; 2] {
    let xs = grid.nodes();
    [
        DVector::from_iterator(xs.len(), xs.iter().map(|&x| C64::from_polar(1.0, k * x))),
        DVector::from_iterator(xs.len(), xs.iter().map(|&x| C64::from_polar(1.0, -k * x))),
    ]
}

/// First-order term `-2πi Γ₀ V Γ₀*` in operator form (acting on `(f̃(k), f̃(-k))`).
pub fn born_term(kernel: &PerturbationKernel, k: f64, cfg: &ScatteringConfig) -> Result<[[C64; 2]; 2]> {
    lambda_checked(k, cfg.lambda_min)?;
    let grid = cfg.solve_grid_for(kernel)?;
    let v = to_complex(&kernel.assemble(&grid)?);
    let e = shell_vectors(&grid, k);
    let g = gamma_factor(k);
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for (j, ej) in e.iter().enumerate() {
        for (l, el) in e.iter().enumerate() {
            out[j][l] = C64::new(0.0, -g) * ej.dotc(&(&v * el)) * grid.step();
        }
    }
    Ok(out)
}

fn fit_plane_waves(grid: &LogGrid, g: &[C64], k: f64, range: std::ops::Range<usize>) -> PlaneWaveFit {
    let (mut a11, mut a12, mut a22) = (0.0, C64::new(0.0, 0.0), 0.0);
    let (mut b1, mut b2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for i in range.clone() {
        let p = C64::from_polar(1.0, k * grid.x(i));
        let m = p.conj();
        a11 += 1.0;
        a22 += 1.0;
        a12 += p.conj() * m;
        b1 += p.conj() * g[i];
        b2 += m.conj() * g[i];
    }
    // normal equations [[a11, a12], [conj a12, a22]] (plus, minus) = (b1, b2)
    let det = a11 * a22 - a12.norm_sqr();
    let plus = (b1 * a22 - a12 * b2) / det;
    let minus = (b2 * a11 - a12.conj() * b1) / det;
    let (mut num, mut den) = (0.0, 0.0);
    for i in range {
        let x = grid.x(i);
        let fit = plus * C64::from_polar(1.0, k * x) + minus * C64::from_polar(1.0, -k * x);
        num += (g[i] - fit).norm_sqr();
        den += g[i].norm_sqr();
    }
    PlaneWaveFit { plus, minus, residual: (num / den.max(f64::MIN_POSITIVE)).sqrt() }
}

/// Fits `ψ_j ≈ c₊ e^{ikx} + c₋ e^{-ikx}` on the outer fraction of the table at both ends.
pub fn extract_asymptotics(table: &mut EigenfunctionTable, cfg: &ScatteringConfig) -> Result<AsymptoticCoefficients> {
    let n = table.grid.len();
    let m = ((n as f64 * cfg.fit_fraction).floor() as usize).max(8);
    if 2 * m > n {
        return Err(Error::GridTooSmall("table too short for asymptotic fits".into()));
    }
    let fit = |j: usize, r: std::ops::Range<usize>| fit_plane_waves(&table.grid, &table.psi[j], table.k, r);
    let coeffs = AsymptoticCoefficients {
        left: [fit(0, 0..m), fit(1, 0..m)],
        right: [fit(0, n - m..n), fit(1, n - m..n)],
    };
    let worst = coeffs.max_residual();
    if worst > cfg.fit_tol {
        return Err(Error::FitFailed { residual: worst, tol: cfg.fit_tol });
    }
    table.coefficients = Some(coeffs);
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_perturbation_gives_identity() {
        let cfg = ScatteringConfig {
            solve_grid: Some(LogGrid::new(-10.0, 10.0, 101).unwrap()),
            ..Default::default()
        };
        let s = scattering_matrix(&PerturbationKernel::zero(), 0.5, &cfg).unwrap();
        assert!((s.to_matrix() - DMatrix::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn k_zero_is_rejected() {
        let cfg = ScatteringConfig::default();
        assert!(scattering_matrix(&PerturbationKernel::exponential(1.0), 0.0, &cfg).is_err());
    }
}
