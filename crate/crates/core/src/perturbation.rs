//! Self-adjoint integral perturbations `V` of the Carleman operator.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grid::LogGrid;
use crate::linalg::{asymmetry, positive_part, spectral_norm, symmetrize};

pub type HankelFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type GeneralFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum KernelShape {
    /// `v(t, s) = v(t + s)`.
    Hankel(HankelFn),
    /// A general real symmetric kernel `v(t, s)`.
    General(GeneralFn),
}

/// A real symmetric kernel `v(t, s)` on `ℝ₊ × ℝ₊` with a decay exponent `α`.
#[derive(Clone)]
pub struct PerturbationKernel {
    name: String,
    shape: KernelShape,
    alpha: f64,
}

impl fmt::Debug for PerturbationKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.shape {
            KernelShape::Hankel(_) => "hankel",
            KernelShape::General(_) => "general",
        };
        f.debug_struct("PerturbationKernel")
            .field("name", &self.name)
            .field("shape", &kind)
            .field("alpha", &self.alpha)
            .finish()
    }
}

const ASYMMETRY_TOL: f64 = 1e-12;

impl PerturbationKernel {
    pub fn hankel<F: Fn(f64) -> f64 + Send + Sync + 'static>(name: &str, v: F) -> Self {
        PerturbationKernel { name: name.into(), shape: KernelShape::Hankel(Arc::new(v)), alpha: 2.0 }
    }

    pub fn general<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(name: &str, v: F) -> Self {
        PerturbationKernel { name: name.into(), shape: KernelShape::General(Arc::new(v)), alpha: 2.0 }
    }

    /// `v(t + s) = c e^{-(t+s)}`.
    pub fn exponential(c: f64) -> Self {
        Self::hankel("exp", move |r| c * (-r).exp())
    }

    /// `v(t + s) = c (t+s)^a e^{-(t+s)}`.
    pub fn gamma(c: f64, a: f64) -> Self {
        Self::hankel("gamma", move |r| c * r.powf(a) * (-r).exp())
    }

    /// `v(t + s) = c (1 + t + s)^{-p}`.
    pub fn rational(c: f64, p: f64) -> Self {
        Self::hankel("rational", move |r| c * (1.0 + r).powf(-p))
    }

    pub fn zero() -> Self {
        Self::hankel("zero", |_| 0.0)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn shape(&self) -> &KernelShape {
        &self.shape
    }

    pub fn is_hankel(&self) -> bool {
        matches!(self.shape, KernelShape::Hankel(_))
    }

    /// `c V`.
    pub fn scaled(&self, c: f64) -> Self {
        let shape = match &self.shape {
            KernelShape::Hankel(f) => {
                let f = f.clone();
                KernelShape::Hankel(Arc::new(move |r| c * f(r)))
            }
            KernelShape::General(f) => {
                let f = f.clone();
                KernelShape::General(Arc::new(move |t, s| c * f(t, s)))
            }
        };
        PerturbationKernel { name: self.name.clone(), shape, alpha: self.alpha }
    }

    pub fn eval(&self, t: f64, s: f64) -> f64 {
        match &self.shape {
            KernelShape::Hankel(f) => f(t + s),
            KernelShape::General(f) => f(t, s),
        }
    }

    /// `v̂(x, y) = e^{(x+y)/2} v(e^x, e^y)`.
    pub fn eval_log(&self, x: f64, y: f64) -> f64 {
        let v = self.eval(x.exp(), y.exp());
        if v == 0.0 {
            0.0
        } else {
            v * (0.5 * (x + y)).exp()
        }
    }

    /// Nyström matrix `h v̂(x_i, x_j)`.
    pub fn assemble(&self, grid: &LogGrid) -> Result<DMatrix<f64>> {
        let n = grid.len();
        let h = grid.step();
        let xs = grid.nodes();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                let v = h * self.eval_log(xs[i], xs[j]);
                if !v.is_finite() {
                    return Err(Error::domain(
                        "kernel",
                        format!("non-finite value at t = {}, s = {}", xs[i].exp(), xs[j].exp()),
                    ));
                }
                m[(i, j)] = v;
            }
        }
        let asym = asymmetry(&m);
        if asym > ASYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        symmetrize(&mut m);
        Ok(m)
    }

    /// Positive part `V₊` of the assembled matrix.
    pub fn assemble_positive(&self, grid: &LogGrid) -> Result<DMatrix<f64>> {
        Ok(positive_part(&self.assemble(grid)?))
    }

    /// Window in `ln t` outside of which `|v̂|` stays below `tol` times its maximum.
    pub fn log_support(&self, tol: f64) -> (f64, f64) {
        let xs: Vec<f64> = (0..=800).map(|i| -200.0 + 0.5 * i as f64).collect();
        let prof: Vec<f64> = xs
            .iter()
            .map(|&x| xs.iter().map(|&y| self.eval_log(x, y).abs()).filter(|v| v.is_finite()).fold(0.0, f64::max))
            .collect();
        let max = prof.iter().cloned().fold(0.0, f64::max);
        if max == 0.0 {
            return (-1.0, 1.0);
        }
        let lo = prof.iter().position(|&p| p >= tol * max).unwrap_or(0);
        let hi = prof.iter().rposition(|&p| p >= tol * max).unwrap_or(xs.len() - 1);
        (xs[lo], xs[hi])
    }

    /// `‖V‖₂ = (∬ |v(t,s)|² dt ds)^{1/2}`.
    pub fn hs_norm(&self, grid: &LogGrid) -> Result<f64> {
        self.weighted_hs_norm(0.0, grid)
    }

    /// `(∬ |v(t,s)|² ⟨ln t⟩^{2α} ⟨ln s⟩^{2α} dt ds)^{1/2}`, with a check that the
    /// integrand has died out at the edges of the window.
    pub fn weighted_hs_norm(&self, alpha: f64, grid: &LogGrid) -> Result<f64> {
        let n = grid.len();
        let h = grid.step();
        let xs = grid.nodes();
        let w: Vec<f64> = xs.iter().map(|x| (1.0 + x * x).powf(0.5 * alpha)).collect();
        let edge = (n / 100).max(1);
        let (mut total, mut outer) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let v = self.eval_log(xs[i], xs[j]) * w[i] * w[j];
                let v2 = v * v;
                total += v2;
                if i < edge || j < edge || i >= n - edge || j >= n - edge {
                    outer += v2;
                }
            }
        }
        if !total.is_finite() {
            return Err(Error::Divergent("weighted Hilbert-Schmidt norm is not finite".into()));
        }
        if total > 0.0 && outer > 1e-10 * total {
            return Err(Error::Divergent(format!(
                "weighted Hilbert-Schmidt integrand carries {:e} of its mass at the window edges",
                outer / total
            )));
        }
        Ok((total * h * h).sqrt())
    }

    /// `∫ |v(t)|² ⟨ln t⟩^{4α} t dt`, the one-variable decay condition for Hankel kernels.
    pub fn hankel_decay_integral(&self, alpha: f64, grid: &LogGrid) -> Result<f64> {
        let KernelShape::Hankel(f) = &self.shape else {
            return Err(Error::domain("kernel", "not a Hankel kernel"));
        };
        let n = grid.len();
        let vals: Vec<f64> = (0..n)
            .map(|i| {
                let x = grid.x(i);
                let v = f(x.exp());
                v * v * (1.0 + x * x).powf(2.0 * alpha) * (2.0 * x).exp()
            })
            .collect();
        let total: f64 = vals.iter().sum();
        let edge = vals[..(n / 100).max(1)].iter().chain(&vals[n - (n / 100).max(1)..]).sum::<f64>();
        if !total.is_finite() || (total > 0.0 && edge > 1e-10 * total) {
            return Err(Error::Divergent("decay integral does not converge in the window".into()));
        }
        Ok(total * grid.step())
    }

    /// `‖Q^α V₊ Q^α‖` with `Q = ⟨ln t⟩`, on the grid.
    pub fn weighted_operator_norm(&self, alpha: f64, grid: &LogGrid) -> Result<f64> {
        let mut v = self.assemble_positive(grid)?;
        let w: Vec<f64> = grid.nodes().iter().map(|x| (1.0 + x * x).powf(0.5 * alpha)).collect();
        for j in 0..v.ncols() {
            for i in 0..v.nrows() {
                v[(i, j)] *= w[i] * w[j];
            }
        }
        Ok(spectral_norm(&v))
    }
}
