//! Determinants and adjugates of Laurent-polynomial matrices.

use num_complex::Complex64;
use rayon::prelude::*;

use super::dft::{dft_eval_with, idft_interpolate_with, next_pow2, DftPlan};
use super::laurent::{LaurentPoly, LaurentPolyMatrix};
use super::linalg::lu_factor;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Matrices at or beyond these sizes are outside the range where the
/// node-wise determinant is reliable to about 1e-8.
pub const ENVELOPE_DIM: usize = 20;
pub const ENVELOPE_DEGREE: usize = 25;

/// Warning text when an `m x m` degree-`n` determinant leaves the reliable range.
pub fn envelope_warning(m: usize, n: usize) -> Option<String> {
    (m >= ENVELOPE_DIM || n >= ENVELOPE_DEGREE)
        .then(|| format!("polynomial determinant of a {m}x{m} degree-{n} matrix may lose accuracy"))
}

/// Determinant by Gaussian elimination with partial pivoting; exact zero
/// pivots give a zero determinant.
pub fn det_dense(a: &ComplexMatrix) -> Complex64 {
    assert!(a.is_square());
    let n = a.rows();
    let mut m = a.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[(i, k)].norm().total_cmp(&m[(j, k)].norm())).unwrap();
        let pivot = m[(p, k)];
        if pivot.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            for j in k..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = tmp;
            }
            det = -det;
        }
        det *= pivot;
        for i in k + 1..n {
            let l = m[(i, k)] / pivot;
            if l.norm() == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let v = m[(k, j)];
                m[(i, j)] -= l * v;
            }
        }
    }
    det
}

/// `det P` on `[m lo, m hi]`, from node-wise determinants on the smallest
/// power-of-two grid that resolves the window.
pub fn polymat_det(p: &LaurentPolyMatrix) -> LaurentPoly {
    assert!(p.is_square(), "determinant of a non-square matrix");
    let m = p.rows() as i64;
    let (lo, hi) = (m * p.lo(), m * p.hi());
    let plan = DftPlan::new(next_pow2((hi - lo + 1) as usize));
    let values = dft_eval_with(&plan, p);
    let dets: Vec<Complex64> = values.par_iter().map(det_dense).collect();
    plan.interpolate(&dets, lo, hi).expect("grid sized to the determinant window")
}

/// `det P` by cofactor expansion along the first row with exact polynomial
/// products. Cost grows factorially; meant for small orders.
pub fn polymat_det_direct(p: &LaurentPolyMatrix) -> LaurentPoly {
    assert!(p.is_square(), "determinant of a non-square matrix");
    let entries: Vec<Vec<LaurentPoly>> =
        (0..p.rows()).map(|i| (0..p.cols()).map(|j| p.entry(i, j)).collect()).collect();
    let rows: Vec<usize> = (0..p.rows()).collect();
    let cols: Vec<usize> = (0..p.cols()).collect();
    laplace(&entries, &rows, &cols)
}

fn laplace(e: &[Vec<LaurentPoly>], rows: &[usize], cols: &[usize]) -> LaurentPoly {
    match rows.len() {
        0 => LaurentPoly::one(),
        1 => e[rows[0]][cols[0]].clone(),
        _ => {
            let r0 = rows[0];
            let sub_rows = &rows[1..];
            let mut acc: Option<LaurentPoly> = None;
            for (k, &c) in cols.iter().enumerate() {
                let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let term = e[r0][c].mul(&laplace(e, sub_rows, &sub_cols));
                let term = if k % 2 == 1 { term.scale(Complex64::new(-1.0, 0.0)) } else { term };
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term),
                });
            }
            acc.unwrap()
        }
    }
}

/// Transposed cofactor matrix `Cof{P}^T = det P · P^{-1}` on
/// `[(m-1) lo, (m-1) hi]`, interpolated from node values.
pub fn cofactor_transpose(p: &LaurentPolyMatrix, det_p: &LaurentPoly) -> Result<LaurentPolyMatrix> {
    assert!(p.is_square(), "cofactors of a non-square matrix");
    let m = p.rows();
    if m == 1 {
        return Ok(LaurentPolyMatrix::identity(1));
    }
    let k = (m - 1) as i64;
    let (lo, hi) = (k * p.lo(), k * p.hi());
    let plan = DftPlan::new(next_pow2((hi - lo + 1) as usize));
    let values = dft_eval_with(&plan, p);
    let dets = plan.eval_poly(det_p);
    let cof: Vec<ComplexMatrix> = values
        .par_iter()
        .zip(dets.par_iter())
        .enumerate()
        .map(|(node, (v, d))| {
            let lu = lu_factor(v).map_err(|_| Error::SingularNode { node })?;
            Ok(lu.inverse().scale(*d))
        })
        .collect::<Result<_>>()?;
    idft_interpolate_with(&plan, &cof, lo, hi)
}

/// Transposed cofactor matrix by exact minors; small orders only.
pub fn cofactor_transpose_direct(p: &LaurentPolyMatrix) -> LaurentPolyMatrix {
    assert!(p.is_square(), "cofactors of a non-square matrix");
    let m = p.rows();
    if m == 1 {
        return LaurentPolyMatrix::identity(1);
    }
    let entries: Vec<Vec<LaurentPoly>> = (0..m).map(|i| (0..m).map(|j| p.entry(i, j)).collect()).collect();
    let k = (m - 1) as i64;
    let mut out = LaurentPolyMatrix::zeros(m, m, k * p.lo(), k * p.hi());
    for i in 0..m {
        for j in 0..m {
            // Cof^T[i][j] = (-1)^{i+j} det(P without row j and column i)
            let rows: Vec<usize> = (0..m).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..m).filter(|&c| c != i).collect();
            let mut minor = laplace(&entries, &rows, &cols);
            if (i + j) % 2 == 1 {
                minor = minor.scale(Complex64::new(-1.0, 0.0));
            }
            out.set_entry(i, j, &minor);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn iee0() -> LaurentPolyMatrix {
        let e = [
            LaurentPoly::from_real(-1, &[2.0, 6.0, 2.0]),
            LaurentPoly::from_real(-1, &[11.0, 22.0, 7.0]),
            LaurentPoly::from_real(-1, &[7.0, 22.0, 11.0]),
            LaurentPoly::from_real(-1, &[38.0, 84.0, 38.0]),
        ];
        LaurentPolyMatrix::from_entries(2, 2, &e).unwrap()
    }

    fn lcg_poly_matrix(m: usize, lo: i64, hi: i64, seed: u64) -> LaurentPolyMatrix {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let coeffs = (lo..=hi).map(|_| ComplexMatrix::from_fn(m, m, |_, _| Complex64::new(next(), next()))).collect();
        LaurentPolyMatrix::new(lo, coeffs).unwrap()
    }

    #[test]
    fn identity_determinant_is_one() {
        let d = polymat_det(&LaurentPolyMatrix::identity(4));
        assert!((d.coeff(0) - c(1.0)).norm() < 1e-15);
        assert_eq!((d.lo(), d.hi()), (0, 0));
    }

    #[test]
    fn iee0_determinant() {
        let expect = [-1.0, 0.0, 2.0, 0.0, -1.0];
        for d in [polymat_det(&iee0()), polymat_det_direct(&iee0())] {
            assert_eq!((d.lo(), d.hi()), (-2, 2));
            for (k, e) in (-2..=2).zip(expect) {
                assert!((d.coeff(k) - c(e)).norm() < 1e-12, "k={k}");
            }
        }
    }

    #[test]
    fn fft_matches_cofactor_expansion() {
        let p = lcg_poly_matrix(3, 0, 2, 5);
        let fast = polymat_det(&p);
        let exact = polymat_det_direct(&p);
        assert!(fast.sub(&exact).sup_norm() <= 1e-10);
    }

    #[test]
    fn adjugate_of_two_by_two() {
        let p = lcg_poly_matrix(2, -1, 1, 3);
        let d = polymat_det_direct(&p);
        let cof = cofactor_transpose(&p, &d).unwrap();
        let expect = [p.entry(1, 1), p.entry(0, 1).scale(c(-1.0)), p.entry(1, 0).scale(c(-1.0)), p.entry(0, 0)];
        for (idx, e) in expect.iter().enumerate() {
            let got = cof.entry(idx / 2, idx % 2);
            assert!(got.sub(e).sup_norm() < 1e-12);
        }
    }

    #[test]
    fn direct_cofactors_match_nodes() {
        let p = lcg_poly_matrix(3, -1, 1, 23);
        let a = cofactor_transpose_direct(&p);
        let b = cofactor_transpose(&p, &polymat_det_direct(&p)).unwrap();
        assert!(a.sub(&b).sup_norm() <= 1e-11);
    }

    #[test]
    fn one_by_one_cofactor_is_one() {
        let p = LaurentPolyMatrix::from_entries(1, 1, &[LaurentPoly::from_real(-1, &[1.0, 3.0, 1.0])]).unwrap();
        let cof = cofactor_transpose(&p, &polymat_det(&p)).unwrap();
        assert_eq!(cof, LaurentPolyMatrix::identity(1));
    }

    #[test]
    fn adjugate_identity_residual() {
        let p = lcg_poly_matrix(3, -2, 2, 17);
        let d = polymat_det(&p);
        let cof = cofactor_transpose(&p, &d).unwrap();
        let lhs = p.mul(&cof);
        let mut err: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { d.clone() } else { LaurentPoly::zeros(d.lo(), d.hi()) };
                err = err.max(lhs.entry(i, j).sub(&target).sup_norm());
            }
        }
        assert!(err <= 1e-9, "{err}");
    }

    #[test]
    fn envelope() {
        assert!(envelope_warning(4, 30).is_some());
        assert!(envelope_warning(20, 1).is_some());
        assert!(envelope_warning(15, 20).is_none());
    }
}
