//! Dense complex linear algebra: pivoted LU with condition estimate,
//! Cholesky, Hermitian square root, and Toeplitz convolution matrices.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Pivots smaller than this fraction of the column's initial magnitude
/// are treated as zero.
pub const PIVOT_THRESHOLD: f64 = 1e-13;

/// Relative tolerance for Hermitian symmetry checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Negative eigenvalues within this fraction of `‖H‖` are clamped to zero.
pub const EIGEN_CLAMP: f64 = 1e-10;

const POLAR_MAX_ITERS: usize = 100;

/// `PA = LU` with unit-lower `L` and upper `U` packed in one matrix.
#[derive(Clone, Debug)]
pub struct LuFactor {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    swaps: usize,
    anorm: f64,
}

/// Factors a square matrix with partial pivoting.
pub fn lu_factor(a: &ComplexMatrix) -> Result<LuFactor> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("LU needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let n = a.rows();
    let col_scale: Vec<f64> = (0..n).map(|j| (0..n).map(|i| a[(i, j)].norm_sqr()).fold(0.0, f64::max).sqrt()).collect();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    for k in 0..n {
        let (p, pmag2) =
            (k..n)
                .map(|i| (i, lu[(i, k)].norm_sqr()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let pmag = pmag2.max(0.0).sqrt();
        if col_scale[k] == 0.0 || pmag < PIVOT_THRESHOLD * col_scale[k] {
            return Err(Error::SingularMatrix { column: k, pivot: pmag.max(0.0) });
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
            perm.swap(k, p);
            swaps += 1;
        }
        let pivot = lu[(k, k)];
        let (top, bottom) = lu.as_mut_slice().split_at_mut((k + 1) * n);
        let prow = &top[k * n..(k + 1) * n];
        for row in bottom.chunks_mut(n) {
            let l = row[k] / pivot;
            row[k] = l;
            if l.re == 0.0 && l.im == 0.0 {
                continue;
            }
            for (x, y) in row[k + 1..].iter_mut().zip(&prow[k + 1..]) {
                *x -= l * y;
            }
        }
    }
    Ok(LuFactor { lu, perm, swaps, anorm: a.norm_one() })
}

impl LuFactor {
    pub fn order(&self) -> usize {
        self.lu.rows()
    }

    pub fn det(&self) -> Complex64 {
        let d: Complex64 = (0..self.order()).map(|i| self.lu[(i, i)]).product();
        if self.swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }

    /// Solves `A x = b` in place.
    pub fn solve_vec_in_place(&self, b: &mut [Complex64]) {
        let n = self.order();
        assert_eq!(b.len(), n);
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: Complex64 = row[..i].iter().zip(&y[..i]).map(|(l, v)| l * v).sum();
            y[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: Complex64 = row[i + 1..].iter().zip(&y[i + 1..]).map(|(u, v)| u * v).sum();
            y[i] = (y[i] - s) / row[i];
        }
        b.copy_from_slice(&y);
    }

    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        self.solve_vec_in_place(&mut x);
        x
    }

    /// Solves `A* z = b`.
    pub fn solve_adjoint_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.order();
        assert_eq!(b.len(), n);
        // A* = U* L* P, so U* w = b, L* v = w, z = P^T v.
        let mut w = b.to_vec();
        for i in 0..n {
            let mut s = w[i];
            for (k, wk) in w.iter().enumerate().take(i) {
                s -= self.lu[(k, i)].conj() * wk;
            }
            w[i] = s / self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            let mut s = w[i];
            for (k, wk) in w.iter().enumerate().skip(i + 1) {
                s -= self.lu[(k, i)].conj() * wk;
            }
            w[i] = s;
        }
        let mut z = vec![ZERO; n];
        for (i, &p) in self.perm.iter().enumerate() {
            z[p] = w[i];
        }
        z
    }

    pub fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.order();
        assert_eq!(b.rows(), n);
        let m = b.cols();
        let mut x = ComplexMatrix::zeros(n, m);
        for (i, &p) in self.perm.iter().enumerate() {
            x.row_mut(i).copy_from_slice(b.row(p));
        }
        let data = x.as_mut_slice();
        for i in 1..n {
            let (done, rest) = data.split_at_mut(i * m);
            let xi = &mut rest[..m];
            for (k, l) in self.lu.row(i)[..i].iter().enumerate() {
                if l.re == 0.0 && l.im == 0.0 {
                    continue;
                }
                for (a, v) in xi.iter_mut().zip(&done[k * m..(k + 1) * m]) {
                    *a -= l * v;
                }
            }
        }
        for i in (0..n).rev() {
            let (head, tail) = data.split_at_mut((i + 1) * m);
            let xi = &mut head[i * m..];
            let row = self.lu.row(i);
            for (u, vk) in row[i + 1..].iter().zip(tail.chunks(m)) {
                for (a, v) in xi.iter_mut().zip(vk) {
                    *a -= u * v;
                }
            }
            for a in xi.iter_mut() {
                *a /= row[i];
            }
        }
        x
    }

    pub fn inverse(&self) -> ComplexMatrix {
        self.solve(&ComplexMatrix::identity(self.order()))
    }

    /// Reciprocal 1-norm condition estimate (Hager's method).
    pub fn rcond(&self) -> f64 {
        let n = self.order();
        if n == 0 || self.anorm == 0.0 {
            return 0.0;
        }
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve_vec(&x);
            est = y.iter().map(|v| v.norm()).sum::<f64>();
            let xi: Vec<Complex64> = y.iter().map(|v| if v.norm() > 0.0 { v / v.norm() } else { ONE }).collect();
            let z = self.solve_adjoint_vec(&xi);
            let (jmax, zmax) =
                z.iter().enumerate().map(|(j, v)| (j, v.norm())).fold((0, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx {
                break;
            }
            x = vec![ZERO; n];
            x[jmax] = ONE;
        }
        if !est.is_finite() || est == 0.0 {
            return 0.0;
        }
        1.0 / (self.anorm * est)
    }
}

/// Solves `A X = B` by pivoted LU.
pub fn lu_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if b.rows() != a.rows() {
        return Err(Error::Dimension(format!("right-hand side has {} rows, system has order {}", b.rows(), a.rows())));
    }
    Ok(lu_factor(a)?.solve(b))
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(lu_factor(a)?.inverse())
}

/// Lower-triangular `L` with positive real diagonal and `L L* = H`.
/// Only the lower triangle of `H` is read.
pub fn cholesky_factor(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !h.is_square() {
        return Err(Error::Dimension("Cholesky needs a square matrix".into()));
    }
    let n = h.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let s: Complex64 = {
                let li = &l.row(i)[..j];
                let lj = &l.row(j)[..j];
                li.iter().zip(lj).map(|(a, b)| a * b.conj()).sum()
            };
            let v = h[(i, j)] - s;
            if i == j {
                if v.re <= 0.0 || !v.re.is_finite() {
                    return Err(Error::NotPositiveDefinite { index: i, pivot: v.re });
                }
                l[(i, i)] = Complex64::new(v.re.sqrt(), 0.0);
            } else {
                l[(i, j)] = v / l[(j, j)].re;
            }
        }
    }
    Ok(l)
}

/// Solves `L L* x = b` given the Cholesky factor.
pub fn cholesky_solve_vec(l: &ComplexMatrix, b: &[Complex64]) -> Vec<Complex64> {
    let n = l.rows();
    assert_eq!(b.len(), n);
    let mut y = b.to_vec();
    for i in 0..n {
        let row = l.row(i);
        let s: Complex64 = row[..i].iter().zip(&y[..i]).map(|(a, v)| a * v).sum();
        y[i] = (y[i] - s) / row[i].re;
    }
    for i in (0..n).rev() {
        let row = l.row(i);
        y[i] /= row[i].re;
        let xi = y[i];
        for (yk, lik) in y[..i].iter_mut().zip(&row[..i]) {
            *yk -= lik.conj() * xi;
        }
    }
    y
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigh(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_square() {
        return Err(Error::Dimension("eigendecomposition needs a square matrix".into()));
    }
    let n = h.rows();
    let scale = h.max_abs();
    let asym = h.hermitian_defect();
    if asym > HERMITIAN_TOL * scale.max(1e-300) {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (h[(i, j)] + h[(j, i)].conj()));
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Hermitian positive semidefinite `R` with `R² = H`.
pub fn hermitian_principal_sqrt(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, q) = hermitian_eigh(h)?;
    let n = h.rows();
    let norm = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut roots = Vec::with_capacity(n);
    for (index, &v) in values.iter().enumerate() {
        if v < -EIGEN_CLAMP * norm {
            return Err(Error::NotPositiveDefinite { index, pivot: v });
        }
        roots.push(v.max(0.0).sqrt());
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| q[(i, k)] * roots[k] * q[(j, k)].conj()).sum()))
}

/// Unitary `Q` of the polar decomposition `A = P Q`, `P = √(A A*)`, by the
/// scaled Newton iteration `X ← (ζ X + ζ⁻¹ X⁻*) / 2`. Stays unitary to
/// round-off even when `A` is ill-conditioned.
pub fn unitary_polar_factor(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::Dimension("polar decomposition needs a square matrix".into()));
    }
    let mut x = a.clone();
    for _ in 0..POLAR_MAX_ITERS {
        let xi = inverse(&x)?.adjoint();
        let zeta = (xi.frobenius_norm() / x.frobenius_norm()).sqrt();
        let next = &x.scale(Complex64::new(0.5 * zeta, 0.0)) + &xi.scale(Complex64::new(0.5 / zeta, 0.0));
        let step = (&next - &x).max_abs();
        x = next;
        if step <= 4.0 * f64::EPSILON {
            break;
        }
    }
    Ok(x)
}

/// `T(a; m)`: the `(l+m+1) x (m+1)` lower-triangular Toeplitz matrix with
/// first column `[a; 0_m]`, so that `T(a; m) x` is the coefficient vector of
/// the product of the polynomials `a` and `x`.
pub fn toeplitz_lower(a: &[Complex64], m: usize) -> ComplexMatrix {
    assert!(!a.is_empty());
    let l = a.len() - 1;
    ComplexMatrix::from_fn(l + m + 1, m + 1, |i, j| if i >= j && i - j <= l { a[i - j] } else { ZERO })
}
