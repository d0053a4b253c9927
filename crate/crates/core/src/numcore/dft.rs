//! Evaluation and interpolation on the DFT grid `t_l = exp(2πil/K)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::laurent::{LaurentPoly, LaurentPolyMatrix};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Smallest power of two `>= n` (and `>= 1`).
pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

/// The `K` nodes `exp(2πil/K)`.
pub fn unit_roots(k: usize) -> Vec<Complex64> {
    (0..k).map(|l| Complex64::from_polar(1.0, 2.0 * PI * l as f64 / k as f64)).collect()
}

/// Forward/inverse FFT pair for one grid size.
#[derive(Clone)]
pub struct DftPlan {
    k: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for DftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DftPlan").field("k", &self.k).finish()
    }
}

impl DftPlan {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "grid needs at least one node");
        let mut planner = FftPlanner::new();
        DftPlan { k, fwd: planner.plan_fft_forward(k), inv: planner.plan_fft_inverse(k) }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Values of `Σ c_j t^(lo+j)` at the grid nodes.
    pub fn eval_coeffs(&self, lo: i64, coeffs: &[Complex64]) -> Vec<Complex64> {
        let k = self.k as i64;
        let mut buf = vec![ZERO; self.k];
        for (j, c) in coeffs.iter().enumerate() {
            buf[(lo + j as i64).rem_euclid(k) as usize] += c;
        }
        self.inv.process(&mut buf);
        buf
    }

    pub fn eval_poly(&self, p: &LaurentPoly) -> Vec<Complex64> {
        self.eval_coeffs(p.lo(), p.coeffs())
    }

    /// Coefficients of the grid function indexed modulo `K` (inverse DFT).
    pub fn spectrum(&self, values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.k);
        let mut buf = values.to_vec();
        self.fwd.process(&mut buf);
        let s = 1.0 / self.k as f64;
        buf.iter_mut().for_each(|z| *z *= s);
        buf
    }

    /// Grid values from a coefficient array indexed modulo `K`.
    pub fn synthesize(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(spectrum.len(), self.k);
        let mut buf = spectrum.to_vec();
        self.inv.process(&mut buf);
        buf
    }

    /// Laurent polynomial on `[lo, hi]` matching the grid values.
    pub fn interpolate(&self, values: &[Complex64], lo: i64, hi: i64) -> Result<LaurentPoly> {
        let window = (hi - lo + 1) as usize;
        if self.k < window {
            return Err(Error::Alias { nodes: self.k, window });
        }
        let spec = self.spectrum(values);
        Ok(select_window(&spec, lo, hi))
    }
}

/// Picks coefficients `lo..=hi` out of a modulo-`K` spectrum.
pub fn select_window(spec: &[Complex64], lo: i64, hi: i64) -> LaurentPoly {
    let k = spec.len() as i64;
    LaurentPoly::new(lo, (lo..=hi).map(|j| spec[j.rem_euclid(k) as usize]).collect())
}

/// Values `P(t_l)`, `l = 0..K-1`, one FFT per entry.
pub fn dft_eval(p: &LaurentPolyMatrix, k: usize) -> Vec<ComplexMatrix> {
    let plan = DftPlan::new(k);
    dft_eval_with(&plan, p)
}

pub fn dft_eval_with(plan: &DftPlan, p: &LaurentPolyMatrix) -> Vec<ComplexMatrix> {
    let (rows, cols) = (p.rows(), p.cols());
    let mut out = vec![ComplexMatrix::zeros(rows, cols); plan.len()];
    for i in 0..rows {
        for j in 0..cols {
            let vals = plan.eval_poly(&p.entry(i, j));
            for (m, v) in out.iter_mut().zip(vals) {
                m[(i, j)] = v;
            }
        }
    }
    out
}

/// Inverse of [`dft_eval`]: the matrix on `[lo, hi]` matching the samples.
pub fn idft_interpolate(values: &[ComplexMatrix], lo: i64, hi: i64) -> Result<LaurentPolyMatrix> {
    let plan = DftPlan::new(values.len().max(1));
    idft_interpolate_with(&plan, values, lo, hi)
}

pub fn idft_interpolate_with(plan: &DftPlan, values: &[ComplexMatrix], lo: i64, hi: i64) -> Result<LaurentPolyMatrix> {
    let first = values.first().ok_or(Error::Alias { nodes: 0, window: (hi - lo + 1) as usize })?;
    let (rows, cols) = (first.rows(), first.cols());
    let mut out = LaurentPolyMatrix::zeros(rows, cols, lo, hi);
    let mut buf = vec![ZERO; values.len()];
    for i in 0..rows {
        for j in 0..cols {
            for (b, m) in buf.iter_mut().zip(values) {
                *b = m[(i, j)];
            }
            let p = plan.interpolate(&buf, lo, hi)?;
            out.set_entry(i, j, &p);
        }
    }
    Ok(out)
}

/// Linear convolution via zero-padded FFT.
pub fn fft_convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len() + b.len() - 1;
    let plan = DftPlan::new(next_pow2(n));
    let fa = plan.eval_coeffs(0, a);
    let fb = plan.eval_coeffs(0, b);
    let prod: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
    let mut spec = plan.spectrum(&prod);
    spec.truncate(n);
    spec
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn monomial_on_four_nodes() {
        let p = LaurentPolyMatrix::constant(ComplexMatrix::identity(1)).window(0, 1);
        let mut t = p.clone();
        t.coeff_mut(0)[(0, 0)] = c(0.0, 0.0);
        t.coeff_mut(1)[(0, 0)] = c(1.0, 0.0);
        let vals = dft_eval(&t, 4);
        let expect = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v[(0, 0)] - e).norm() < 1e-15);
        }
        let back = idft_interpolate(&vals, 0, 1).unwrap();
        assert!((back.coeff(0).unwrap()[(0, 0)]).norm() < 1e-15);
        assert!((back.coeff(1).unwrap()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn constant_identity_on_three_nodes() {
        let vals = dft_eval(&LaurentPolyMatrix::identity(2), 3);
        assert_eq!(vals.len(), 3);
        for v in vals {
            assert!((&v - &ComplexMatrix::identity(2)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn negative_indices_unwrap() {
        // -t^{-2} + 2 - t^2 sampled on 8 nodes
        let p = LaurentPoly::from_real(-2, &[-1.0, 0.0, 2.0, 0.0, -1.0]);
        let plan = DftPlan::new(8);
        let vals = plan.eval_poly(&p);
        let back = plan.interpolate(&vals, -2, 2).unwrap();
        let expect = [-1.0, 0.0, 2.0, 0.0, -1.0];
        for (x, e) in back.coeffs().iter().zip(expect) {
            assert!((x - c(e, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn too_few_nodes_is_alias_error() {
        let plan = DftPlan::new(4);
        let vals = vec![ZERO; 4];
        assert!(matches!(plan.interpolate(&vals, -2, 2), Err(Error::Alias { nodes: 4, window: 5 })));
    }

    #[test]
    fn convolution_matches_direct() {
        let a = [c(1.0, 0.0), c(2.0, 1.0), c(0.0, -1.0)];
        let b = [c(3.0, 0.0), c(-1.0, 0.5)];
        let f = fft_convolve(&a, &b);
        let d = super::super::laurent::direct_convolve(&a, &b);
        for (x, y) in f.iter().zip(&d) {
            assert!((x - y).norm() < 1e-14);
        }
    }
}
