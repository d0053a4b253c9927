//! Unitary (wavelet) matrix functions that make `F_m U_m` causal, where
//! `F_m` is the identity with its last row replaced by `(ζ_1, …, ζ_{m-1}, f_m)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::dft::{next_pow2, DftPlan};
use crate::numcore::linalg::{cholesky_factor, cholesky_solve_vec, hermitian_eigh, lu_factor};
use crate::numcore::polydet::det_dense;
use crate::numcore::{ComplexMatrix, LaurentPoly, LaurentPolyMatrix};
use crate::scalarfact::{causal_expand, RationalCausal};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `V(0)` with a smaller reciprocal condition number is rejected.
pub const V0_RCOND_MIN: f64 = 1e-12;

/// Truncated last row of `F_m`: `ζ_j` on `[-N, n]` and `f_m` on `[0, N+n]`.
#[derive(Clone, Debug)]
pub struct LastRowData {
    pub m: usize,
    pub n_trunc: usize,
    pub zeta: Vec<LaurentPoly>,
    pub fm: LaurentPoly,
}

impl LastRowData {
    pub fn new(n_trunc: usize, zeta: Vec<LaurentPoly>, fm: LaurentPoly) -> Result<Self> {
        if fm.lo() != 0 {
            return Err(Error::InvalidParams("f_m must be causal".into()));
        }
        if fm.coeff(0).norm() == 0.0 {
            return Err(Error::InvalidParams("f_m vanishes at the origin".into()));
        }
        Ok(LastRowData { m: zeta.len() + 1, n_trunc, zeta, fm })
    }
}

/// `b`: first `N+1` coefficients of `1/f_m`; `lambdas[i]`: `(η_{i0}, …, η_{iN})`.
#[derive(Clone, Debug)]
pub struct Generators {
    pub b: Vec<Complex64>,
    pub lambdas: Vec<Vec<Complex64>>,
}

/// `out[p] = Σ_k conj?(a[p+k]) · y[k]` for `p = 0..len`, via one FFT product.
struct Correlator {
    plan: DftPlan,
    len: usize,
}

impl Correlator {
    fn new(len: usize) -> Self {
        Correlator { plan: DftPlan::new(next_pow2(2 * len - 1)), len }
    }

    /// Grid values of the reversed sequence, conjugated if asked.
    fn prepare_reversed(&self, a: &[Complex64], conj: bool) -> Vec<Complex64> {
        let rev: Vec<Complex64> = a.iter().rev().map(|z| if conj { z.conj() } else { *z }).collect();
        self.plan.eval_coeffs(0, &rev)
    }

    fn prepare(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.plan.eval_coeffs(0, y)
    }

    fn apply(&self, rev_vals: &[Complex64], y_vals: &[Complex64]) -> Vec<Complex64> {
        let prod: Vec<Complex64> = rev_vals.iter().zip(y_vals).map(|(a, b)| a * b).collect();
        let conv = self.plan.spectrum(&prod);
        let n = self.len - 1;
        (0..self.len).map(|p| conv[n - p]).collect()
    }
}

pub fn build_generators(row: &LastRowData) -> Result<Generators> {
    let n = row.n_trunc;
    let len = n + 1;
    let q = row.fm.window(0, row.fm.hi().max(n as i64));
    let b = causal_expand(&RationalCausal::new(LaurentPoly::one(), q)?, 0, n as i64)?.into_coeffs();
    let corr = Correlator::new(len);
    let b_vals = corr.prepare(&b);
    let lambdas = row
        .zeta
        .iter()
        .map(|z| {
            let mut gamma: Vec<Complex64> = (0..=n as i64).map(|k| z.coeff(-k)).collect();
            gamma[0] = ZERO;
            corr.apply(&corr.prepare_reversed(&gamma, false), &b_vals)
        })
        .collect();
    Ok(Generators { b, lambdas })
}

/// Dense `Δ = Σ Θ_i Θ_i* + I` with `Θ_i` the upper-left Hankel matrix of `η_i`.
pub fn delta_matrix(lambdas: &[Vec<Complex64>], n_trunc: usize) -> ComplexMatrix {
    let len = n_trunc + 1;
    let mut d = ComplexMatrix::zeros(len, len);
    for p in (0..len).rev() {
        for q in (0..len).rev() {
            let mut v: Complex64 = lambdas.iter().map(|e| e[p] * e[q].conj()).sum();
            if p + 1 < len && q + 1 < len {
                v += d[(p + 1, q + 1)];
            } else if p == n_trunc && q == n_trunc {
                v += ONE;
            }
            d[(p, q)] = v;
        }
    }
    d
}

/// Dense Hankel `Θ[p][q] = η_{p+q}` (zero past `N`).
pub fn theta_matrix(eta: &[Complex64]) -> ComplexMatrix {
    let len = eta.len();
    ComplexMatrix::from_fn(len, len, |p, q| if p + q < len { eta[p + q] } else { ZERO })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaSolver {
    /// Form `Δ` and factor it by Cholesky.
    #[default]
    Dense,
    /// Generalized Schur recursion on the rank-`m` displacement generator.
    Displacement,
}

/// Lower Cholesky factor of the reversed matrix `PΔP`, stored by columns
/// (column `k` holds rows `k..=N`).
struct DisplacementFactor {
    cols: Vec<Vec<Complex64>>,
}

impl DisplacementFactor {
    fn new(lambdas: &[Vec<Complex64>], n_trunc: usize) -> Result<Self> {
        let len = n_trunc + 1;
        // PΔP − Z(PΔP)Z* = G G*, G = [reversed η_1 … reversed η_{m-1}, e_0].
        let mut g: Vec<Vec<Complex64>> = lambdas.iter().map(|e| e.iter().rev().copied().collect()).collect();
        let mut e0 = vec![ZERO; len];
        e0[0] = ONE;
        g.push(e0);
        let r = g.len();
        let mut cols = Vec::with_capacity(len);
        for k in 0..len {
            for j in 1..r {
                let a = g[0][k];
                let b = g[j][k];
                if b.re == 0.0 && b.im == 0.0 {
                    continue;
                }
                let rho = (a.norm_sqr() + b.norm_sqr()).sqrt();
                let (ca, cb) = (a.conj() / rho, b.conj() / rho);
                let (sa, sb) = (a / rho, b / rho);
                let (head, tail) = g.split_at_mut(j);
                let (g0, gj) = (&mut head[0], &mut tail[0]);
                for p in k..len {
                    let x = g0[p];
                    let y = gj[p];
                    g0[p] = ca * x + cb * y;
                    gj[p] = sa * y - sb * x;
                }
            }
            let pivot = g[0][k];
            if pivot.re <= 0.0 || pivot.re.is_nan() {
                return Err(Error::NotPositiveDefinite { index: k, pivot: pivot.re });
            }
            g[0][k] = Complex64::new(pivot.re, 0.0);
            cols.push(g[0][k..].to_vec());
            for p in (k + 1..len).rev() {
                g[0][p] = g[0][p - 1];
            }
        }
        Ok(DisplacementFactor { cols })
    }

    /// Solves `Δ x = b`.
    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let len = self.cols.len();
        let mut y: Vec<Complex64> = b.iter().rev().copied().collect();
        for k in 0..len {
            let col = &self.cols[k];
            y[k] /= col[0].re;
            let yk = y[k];
            for (t, l) in y[k + 1..].iter_mut().zip(&col[1..]) {
                *t -= l * yk;
            }
        }
        for k in (0..len).rev() {
            let col = &self.cols[k];
            let s: Complex64 = col[1..].iter().zip(&y[k + 1..]).map(|(l, x)| l.conj() * x).sum();
            y[k] = (y[k] - s) / col[0].re;
        }
        y.reverse();
        y
    }
}

/// Solutions of `Δ X_i = Λ_i^T` for the `m-1` generators and `Λ_m = e_0`.
pub fn solve_delta(lambdas: &[Vec<Complex64>], n_trunc: usize, solver: DeltaSolver) -> Result<Vec<Vec<Complex64>>> {
    let len = n_trunc + 1;
    if lambdas.iter().any(|l| l.len() != len) {
        return Err(Error::Dimension(format!("generators must have length {len}")));
    }
    let mut rhs: Vec<Vec<Complex64>> = lambdas.to_vec();
    let mut e0 = vec![ZERO; len];
    e0[0] = ONE;
    rhs.push(e0);
    match solver {
        DeltaSolver::Dense => {
            let l = cholesky_factor(&delta_matrix(lambdas, n_trunc))?;
            Ok(rhs.iter().map(|b| cholesky_solve_vec(&l, b)).collect())
        }
        DeltaSolver::Displacement => {
            let f = DisplacementFactor::new(lambdas, n_trunc)?;
            Ok(rhs.iter().map(|b| f.solve(b)).collect())
        }
    }
}

/// Unitary matrix function on `[-N, N]`: rows `0..m-1` causal, last row
/// anticausal.
#[derive(Clone, Debug)]
pub struct WaveletMatrix {
    pub m: usize,
    pub n_trunc: usize,
    pub u: LaurentPolyMatrix,
    pub rcond_v0: f64,
}

pub fn assemble_wavelet(row: &LastRowData, xs: &[Vec<Complex64>], lambdas: &[Vec<Complex64>]) -> Result<WaveletMatrix> {
    let m = row.m;
    let n = row.n_trunc;
    let len = n + 1;
    if xs.len() != m || lambdas.len() != m - 1 {
        return Err(Error::Dimension("wavelet assembly needs m solutions and m-1 generators".into()));
    }
    let nn = n as i64;
    let mut v = LaurentPolyMatrix::zeros(m, m, -nn, nn);
    if m > 1 {
        let corr = Correlator::new(len);
        let eta_vals: Vec<Vec<Complex64>> = lambdas.iter().map(|e| corr.prepare_reversed(e, true)).collect();
        for (j, x) in xs.iter().enumerate() {
            let x_vals = corr.prepare(x);
            for (i, ev) in eta_vals.iter().enumerate() {
                let mut col = corr.apply(ev, &x_vals);
                if i == j {
                    col[0] -= ONE;
                }
                for (p, c) in col.into_iter().enumerate() {
                    v.coeff_mut(p as i64)[(i, j)] = c;
                }
            }
        }
    }
    for (j, x) in xs.iter().enumerate() {
        for (k, c) in x.iter().enumerate() {
            v.coeff_mut(-(k as i64))[(m - 1, j)] = *c;
        }
    }
    let v0 = v.coeff_or_zero(0);
    let lu = lu_factor(&v0).map_err(|_| Error::IllConditionedV0 { rcond: 0.0 })?;
    let rcond_v0 = lu.rcond();
    if rcond_v0 < V0_RCOND_MIN {
        return Err(Error::IllConditionedV0 { rcond: rcond_v0 });
    }
    let u1 = v.mul_const(&lu.inverse());
    // U1(t)* U1(t) is a constant H; the Gram sum over coefficients recovers it.
    let mut h = ComplexMatrix::zeros(m, m);
    for c in u1.coeff_matrices() {
        h = &h + &c.adjoint().matmul(c);
    }
    let (vals, q) = hermitian_eigh(&h)?;
    if vals.first().is_none_or(|v| *v <= 0.0 || v.is_nan()) {
        return Err(Error::IllConditionedV0 { rcond: 0.0 });
    }
    let h_inv_sqrt =
        ComplexMatrix::from_fn(m, m, |a, b| (0..m).map(|k| q[(a, k)] * q[(b, k)].conj() / vals[k].sqrt()).sum());
    Ok(WaveletMatrix { m, n_trunc: n, u: u1.mul_const(&h_inv_sqrt), rcond_v0 })
}

/// Generators, `Δ` solves and assembly in one call.
pub fn build_wavelet(row: &LastRowData, solver: DeltaSolver) -> Result<WaveletMatrix> {
    if row.m == 1 {
        return Ok(WaveletMatrix { m: 1, n_trunc: row.n_trunc, u: LaurentPolyMatrix::identity(1), rcond_v0: 1.0 });
    }
    let gens = build_generators(row)?;
    let xs = solve_delta(&gens.lambdas, row.n_trunc, solver)?;
    assemble_wavelet(row, &xs, &gens.lambdas)
}

/// `(max ‖U U* − I‖, max |det U − 1|)` over `nodes` grid points, with the
/// norm taken entrywise.
pub fn unitary_defect(u: &LaurentPolyMatrix, nodes: usize) -> (f64, f64) {
    let vals = crate::numcore::dft::dft_eval(u, nodes);
    let m = u.rows();
    let id = ComplexMatrix::identity(m);
    vals.iter().fold((0.0f64, 0.0f64), |(d, dd), v| {
        let g = &v.mul_adjoint(v) - &id;
        (d.max(g.max_abs()), dd.max((det_dense(v) - ONE).norm()))
    })
}

/// `F_m` on `[-N, N+n]`: identity rows above, `(ζ, f_m)` as the last row.
pub fn last_row_matrix(row: &LastRowData) -> LaurentPolyMatrix {
    let m = row.m;
    let lo = row.zeta.iter().map(|z| z.lo()).min().unwrap_or(0).min(0);
    let hi = row.zeta.iter().map(|z| z.hi()).max().unwrap_or(0).max(row.fm.hi());
    let mut f = LaurentPolyMatrix::zeros(m, m, lo, hi);
    for i in 0..m - 1 {
        f.coeff_mut(0)[(i, i)] = ONE;
    }
    for (j, z) in row.zeta.iter().enumerate() {
        f.set_entry(m - 1, j, z);
    }
    f.set_entry(m - 1, m - 1, &row.fm);
    f
}

/// Sup-norm of the negative-index coefficients of `F_m U`.
pub fn causality_defect(row: &LastRowData, u: &LaurentPolyMatrix) -> f64 {
    let f = last_row_matrix(row);
    let lo = f.lo() + u.lo();
    if lo > -1 {
        return 0.0;
    }
    f.mul_window(u, lo, -1).sup_norm()
}
