//! Laurent polynomials and Laurent-polynomial matrices.
//!
//! A Laurent polynomial is stored densely over an index window `[lo, hi]`;
//! coefficient `k` multiplies `t^k`. Matrices keep one coefficient matrix per
//! index, all entries sharing the window.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dft::fft_convolve;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Direct convolution is used below this many multiply-adds.
const FFT_CONV_THRESHOLD: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentPoly {
    lo: i64,
    coeffs: Vec<Complex64>,
}

impl LaurentPoly {
    /// Polynomial with `coeffs[k]` at index `lo + k`. Panics if `coeffs` is empty.
    pub fn new(lo: i64, coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a Laurent polynomial needs at least one coefficient");
        LaurentPoly { lo, coeffs }
    }

    pub fn from_real(lo: i64, coeffs: &[f64]) -> Self {
        Self::new(lo, coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi);
        Self::new(lo, vec![ZERO; (hi - lo + 1) as usize])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(0, vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn monomial(k: i64, c: Complex64) -> Self {
        Self::new(k, vec![c])
    }

    #[inline]
    pub fn lo(&self) -> i64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at index `k`, zero outside the window.
    #[inline]
    pub fn coeff(&self, k: i64) -> Complex64 {
        if k < self.lo || k > self.hi() {
            ZERO
        } else {
            self.coeffs[(k - self.lo) as usize]
        }
    }

    pub fn set_coeff(&mut self, k: i64, c: Complex64) {
        assert!(k >= self.lo && k <= self.hi(), "index {k} outside window");
        let lo = self.lo;
        self.coeffs[(k - lo) as usize] = c;
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        // Horner over the window, then shift by t^lo.
        let mut acc = ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc * t.powi(self.lo as i32)
    }

    /// Restriction (or zero-padding) to the window `[lo, hi]`.
    pub fn window(&self, lo: i64, hi: i64) -> Self {
        assert!(lo <= hi);
        Self::new(lo, (lo..=hi).map(|k| self.coeff(k)).collect())
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let coeffs = if self.len() * other.len() > FFT_CONV_THRESHOLD {
            fft_convolve(&self.coeffs, &other.coeffs)
        } else {
            direct_convolve(&self.coeffs, &other.coeffs)
        };
        LaurentPoly::new(self.lo + other.lo, coeffs)
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        LaurentPoly::new(lo, (lo..=hi).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        LaurentPoly::new(lo, (lo..=hi).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scale(&self, s: Complex64) -> LaurentPoly {
        LaurentPoly::new(self.lo, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p*(t) = conj(p(1/conj t))`: negate the window and conjugate.
    pub fn adjoint(&self) -> LaurentPoly {
        LaurentPoly::new(-self.hi(), self.coeffs.iter().rev().map(|c| c.conj()).collect())
    }

    /// Largest coefficient modulus.
    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest `|c_{-k} - conj(c_k)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let m = self.lo.unsigned_abs().max(self.hi().unsigned_abs()) as i64;
        (0..=m).map(|k| (self.coeff(-k) - self.coeff(k).conj()).norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * self.sup_norm().max(f64::MIN_POSITIVE)
    }
}

pub(crate) fn direct_convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.re == 0.0 && x.im == 0.0 {
            continue;
        }
        for (o, y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out
}

/// Matrix of Laurent polynomials sharing one index window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentPolyMatrix {
    rows: usize,
    cols: usize,
    lo: i64,
    coeffs: Vec<ComplexMatrix>,
}

impl LaurentPolyMatrix {
    pub fn new(lo: i64, coeffs: Vec<ComplexMatrix>) -> Result<Self> {
        let first = coeffs.first().ok_or_else(|| Error::Dimension("empty coefficient list".into()))?;
        let (rows, cols) = (first.rows(), first.cols());
        if coeffs.iter().any(|c| c.rows() != rows || c.cols() != cols) {
            return Err(Error::Dimension("coefficient matrices differ in shape".into()));
        }
        Ok(LaurentPolyMatrix { rows, cols, lo, coeffs })
    }

    pub fn zeros(rows: usize, cols: usize, lo: i64, hi: i64) -> Self {
        assert!(lo <= hi);
        LaurentPolyMatrix { rows, cols, lo, coeffs: vec![ComplexMatrix::zeros(rows, cols); (hi - lo + 1) as usize] }
    }

    pub fn constant(m: ComplexMatrix) -> Self {
        LaurentPolyMatrix { rows: m.rows(), cols: m.cols(), lo: 0, coeffs: vec![m] }
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(ComplexMatrix::identity(n))
    }

    /// Builds a matrix from row-major entries, padding all to a common window.
    pub fn from_entries(rows: usize, cols: usize, entries: &[LaurentPoly]) -> Result<Self> {
        if entries.len() != rows * cols || entries.is_empty() {
            return Err(Error::Dimension(format!("{} entries for a {}x{} matrix", entries.len(), rows, cols)));
        }
        let lo = entries.iter().map(LaurentPoly::lo).min().unwrap_or(0);
        let hi = entries.iter().map(LaurentPoly::hi).max().unwrap_or(0);
        let mut out = Self::zeros(rows, cols, lo, hi);
        for i in 0..rows {
            for j in 0..cols {
                out.set_entry(i, j, &entries[i * cols + j]);
            }
        }
        Ok(out)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn lo(&self) -> i64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn window_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn coeff_matrices(&self) -> &[ComplexMatrix] {
        &self.coeffs
    }

    pub fn coeff_matrices_mut(&mut self) -> &mut [ComplexMatrix] {
        &mut self.coeffs
    }

    /// Coefficient matrix at index `k`, or `None` outside the window.
    pub fn coeff(&self, k: i64) -> Option<&ComplexMatrix> {
        if k < self.lo || k > self.hi() {
            None
        } else {
            Some(&self.coeffs[(k - self.lo) as usize])
        }
    }

    pub fn coeff_or_zero(&self, k: i64) -> ComplexMatrix {
        self.coeff(k).cloned().unwrap_or_else(|| ComplexMatrix::zeros(self.rows, self.cols))
    }

    pub fn coeff_mut(&mut self, k: i64) -> &mut ComplexMatrix {
        assert!(k >= self.lo && k <= self.hi(), "index {k} outside window");
        let lo = self.lo;
        &mut self.coeffs[(k - lo) as usize]
    }

    pub fn entry(&self, i: usize, j: usize) -> LaurentPoly {
        LaurentPoly::new(self.lo, self.coeffs.iter().map(|c| c[(i, j)]).collect())
    }

    /// Writes `p` into entry `(i, j)`; `p` must fit the window.
    pub fn set_entry(&mut self, i: usize, j: usize, p: &LaurentPoly) {
        assert!(
            p.lo() >= self.lo && p.hi() <= self.hi(),
            "entry window [{}, {}] exceeds matrix window [{}, {}]",
            p.lo(),
            p.hi(),
            self.lo,
            self.hi()
        );
        let lo = self.lo;
        for (idx, c) in self.coeffs.iter_mut().enumerate() {
            c[(i, j)] = p.coeff(lo + idx as i64);
        }
    }

    pub fn eval(&self, t: Complex64) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.rows, self.cols);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(t);
            acc = &acc + c;
        }
        acc.scale(t.powi(self.lo as i32))
    }

    pub fn window(&self, lo: i64, hi: i64) -> Self {
        assert!(lo <= hi);
        LaurentPolyMatrix {
            rows: self.rows,
            cols: self.cols,
            lo,
            coeffs: (lo..=hi).map(|k| self.coeff_or_zero(k)).collect(),
        }
    }

    /// Rows `r0..r0+nr`, columns `c0..c0+nc`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        LaurentPolyMatrix {
            rows: nr,
            cols: nc,
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| c.block(r0, c0, nr, nc)).collect(),
        }
    }

    /// Upper-left `m x m` submatrix `S_[m]`.
    pub fn leading(&self, m: usize) -> Self {
        self.block(0, 0, m, m)
    }

    /// Matrix product of series; window `[P.lo+Q.lo, P.hi+Q.hi]`.
    pub fn mul(&self, other: &LaurentPolyMatrix) -> LaurentPolyMatrix {
        self.mul_window(other, self.lo + other.lo, self.hi() + other.hi())
    }

    /// Product coefficients restricted to `[lo, hi]`, without forming the rest.
    pub fn mul_window(&self, other: &LaurentPolyMatrix, lo: i64, hi: i64) -> LaurentPolyMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions disagree");
        assert!(lo <= hi);
        let mut out = Self::zeros(self.rows, other.cols, lo, hi);
        for (idx, acc) in out.coeffs.iter_mut().enumerate() {
            let k = lo + idx as i64;
            let k1_lo = self.lo.max(k - other.hi());
            let k1_hi = self.hi().min(k - other.lo);
            for k1 in k1_lo..=k1_hi {
                let a = &self.coeffs[(k1 - self.lo) as usize];
                let b = &other.coeffs[(k - k1 - other.lo) as usize];
                a.matmul_acc(b, acc);
            }
        }
        out
    }

    /// `P*(t)`: conjugate transpose with the window negated.
    pub fn adjoint(&self) -> LaurentPolyMatrix {
        LaurentPolyMatrix {
            rows: self.cols,
            cols: self.rows,
            lo: -self.hi(),
            coeffs: self.coeffs.iter().rev().map(ComplexMatrix::adjoint).collect(),
        }
    }

    pub fn add(&self, other: &LaurentPolyMatrix) -> LaurentPolyMatrix {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &LaurentPolyMatrix) -> LaurentPolyMatrix {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &LaurentPolyMatrix, op: impl Fn(Complex64, Complex64) -> Complex64) -> LaurentPolyMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let coeffs = (lo..=hi)
            .map(|k| {
                let a = self.coeff_or_zero(k);
                let b = other.coeff_or_zero(k);
                ComplexMatrix::from_fn(self.rows, self.cols, |i, j| op(a[(i, j)], b[(i, j)]))
            })
            .collect();
        LaurentPolyMatrix { rows: self.rows, cols: self.cols, lo, coeffs }
    }

    /// Right multiplication by a constant matrix.
    pub fn mul_const(&self, u: &ComplexMatrix) -> LaurentPolyMatrix {
        LaurentPolyMatrix {
            rows: self.rows,
            cols: u.cols(),
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| c.matmul(u)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> LaurentPolyMatrix {
        LaurentPolyMatrix {
            rows: self.rows,
            cols: self.cols,
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(),
        }
    }

    /// Coefficient sup-norm: the largest coefficient modulus over all entries.
    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().map(ComplexMatrix::max_abs).fold(0.0, f64::max)
    }

    /// Largest entry of `|C_{-k} - C_k*|` over the window.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let m = self.lo.unsigned_abs().max(self.hi().unsigned_abs()) as i64;
        let mut d: f64 = 0.0;
        for k in 0..=m {
            let a = self.coeff_or_zero(-k);
            let b = self.coeff_or_zero(k).adjoint();
            d = d.max((&a - &b).max_abs());
        }
        d
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * self.sup_norm().max(f64::MIN_POSITIVE)
    }

    /// Degree `n` of a density supported on `[-n, n]`.
    pub fn half_width(&self) -> usize {
        self.lo.unsigned_abs().max(self.hi().unsigned_abs()) as usize
    }
}
