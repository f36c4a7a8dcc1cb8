//! Uniform grids in `x = ln t` and the unitary map `f(t) ↦ g(x) = e^{x/2} f(e^x)`.
//!
//! Functions on a grid are stored in this log representation; integrals use the
//! uniform weight `h`, which is the trapezoid rule for functions that vanish at
//! both ends of the window.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const MIN_NODES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct LogGrid {
    x_min: f64,
    h: f64,
    n: usize,
}

impl Default for LogGrid {
    fn default() -> Self {
        LogGrid::new(-40.0, 40.0, 4096).expect("default grid is valid")
    }
}

impl LogGrid {
    /// `n` nodes spanning `[x_min, x_max]` inclusive.
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::domain("grid", format!("bad window [{x_min}, {x_max}]")));
        }
        if n < 2 {
            return Err(Error::domain("grid", format!("n = {n} is too small")));
        }
        Ok(LogGrid { x_min, h: (x_max - x_min) / (n - 1) as f64, n })
    }

    /// `n` nodes `x_min + j h`.
    pub fn with_step(x_min: f64, h: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && h.is_finite() && h > 0.0) || n < 2 {
            return Err(Error::domain("grid", format!("bad step {h} or n = {n}")));
        }
        Ok(LogGrid { x_min, h, n })
    }

    /// Smallest grid with step at most `h` covering `[x_min, x_max]`.
    pub fn covering(x_min: f64, x_max: f64, h: f64) -> Result<Self> {
        let n = ((x_max - x_min) / h).ceil() as usize + 1;
        LogGrid::new(x_min, x_max, n.max(2))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.n - 1)
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.h
    }

    pub fn t(&self, i: usize) -> f64 {
        self.x(i).exp()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Same window with twice as many intervals.
    pub fn refined(&self) -> LogGrid {
        LogGrid { x_min: self.x_min, h: self.h / 2.0, n: 2 * self.n - 1 }
    }

    /// Same step with the window extended by `factor` around its centre.
    pub fn widened(&self, factor: f64) -> LogGrid {
        let c = 0.5 * (self.x_min + self.x_max());
        let half = 0.5 * (self.x_max() - self.x_min) * factor;
        let n = (2.0 * half / self.h).round() as usize + 1;
        LogGrid { x_min: c - half, h: self.h, n }
    }

    pub fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::Shape(format!("{len} samples on a grid of {} nodes", self.n)));
        }
        Ok(())
    }

    /// Samples `f(t_i)` to log samples `g(x_i)`.
    pub fn to_log(&self, f: &[C64]) -> Result<Vec<C64>> {
        self.check_len(f.len())?;
        Ok(f.iter().enumerate().map(|(i, v)| v * (0.5 * self.x(i)).exp()).collect())
    }

    pub fn from_log(&self, g: &[C64]) -> Result<Vec<C64>> {
        self.check_len(g.len())?;
        Ok(g.iter().enumerate().map(|(i, v)| v * (-0.5 * self.x(i)).exp()).collect())
    }

    /// Log samples of a function given in the `t` variable.
    pub fn sample<F: Fn(f64) -> C64>(&self, f: F) -> Vec<C64> {
        (0..self.n).map(|i| f(self.t(i)) * (0.5 * self.x(i)).exp()).collect()
    }

    /// Log samples of a function given in the `x` variable.
    pub fn sample_log<F: Fn(f64) -> C64>(&self, g: F) -> Vec<C64> {
        (0..self.n).map(|i| g(self.x(i))).collect()
    }

    /// `‖f‖²_{L²(ℝ₊)}` from log samples.
    pub fn norm_sq(&self, g: &[C64]) -> f64 {
        self.h * g.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self, g: &[C64]) -> f64 {
        self.norm_sq(g).sqrt()
    }

    /// `⟨f, g⟩`, conjugate-linear in the first argument.
    pub fn inner(&self, f: &[C64], g: &[C64]) -> C64 {
        f.iter().zip(g).map(|(a, b)| a.conj() * b).sum::<C64>() * self.h
    }

    /// `‖f‖²` computed in the `t` variable with trapezoid weights `t_i h`; agrees with
    /// [`LogGrid::norm_sq`] up to the end corrections.
    pub fn norm_sq_t(&self, f: &[C64]) -> f64 {
        let mut s = 0.0;
        for (i, v) in f.iter().enumerate() {
            let w = if i == 0 || i + 1 == self.n { 0.5 } else { 1.0 };
            s += w * v.norm_sqr() * self.t(i);
        }
        s * self.h
    }

    /// Fraction of `‖g‖²` carried by the outer `frac` of the nodes on each side.
    pub fn edge_mass(&self, g: &[C64], frac: f64) -> f64 {
        let m = ((self.n as f64 * frac).ceil() as usize).max(1).min(self.n / 2);
        let total: f64 = g.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let edge: f64 = g[..m].iter().chain(&g[self.n - m..]).map(|v| v.norm_sqr()).sum();
        edge / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_map_is_isometric() {
        let grid = LogGrid::new(-30.0, 30.0, 2001).unwrap();
        let f: Vec<C64> = (0..grid.len())
            .map(|i| {
                let t = grid.t(i);
                C64::new((-(t.ln()).powi(2) / 2.0).exp() / t.sqrt(), 0.0)
            })
            .collect();
        let g = grid.to_log(&f).unwrap();
        let a = grid.norm_sq(&g);
        let b = grid.norm_sq_t(&f);
        assert!((a - b).abs() < 1e-12 * a);
        assert!((a - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        let back = grid.from_log(&g).unwrap();
        assert!(back.iter().zip(&f).all(|(p, q)| (p - q).norm() <= 1e-14 * q.norm().max(1e-300)));
    }

    #[test]
    fn refine_and_widen() {
        let grid = LogGrid::new(-10.0, 10.0, 101).unwrap();
        let r = grid.refined();
        assert_eq!(r.len(), 201);
        assert!((r.x_max() - 10.0).abs() < 1e-12);
        let w = grid.widened(2.0);
        assert!((w.x_min() + 20.0).abs() < 1e-12 && (w.x_max() - 20.0).abs() < 1e-12);
        assert!(grid.to_log(&[C64::new(0.0, 0.0)]).is_err());
    }
}
