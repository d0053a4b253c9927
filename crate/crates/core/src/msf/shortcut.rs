//! Last-row quantities of one recursion step: `ζ_j` by Cramer's rule or by
//! node-wise solves, and `f_m⁺` from determinants or from the power balance
//! `Σ|ζ_j|² + |f_m|² = s_mm`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::params::{AlgoParams, DetMethod};
use crate::error::{Error, Result};
use crate::numcore::linalg::lu_factor;
use crate::numcore::{
    cofactor_transpose, cofactor_transpose_direct, polymat_det, polymat_det_direct, ComplexMatrix, DftPlan,
    LaurentPoly, LaurentPolyMatrix,
};
use crate::scalarfact::{scalar_factor, scalar_factor_explog, DensitySamples, RationalCausal};

/// Negative squared moduli below `-NEGATIVE_POWER_TOL · ‖s_mm‖` are errors.
pub const NEGATIVE_POWER_TOL: f64 = 1e-6;

/// Causal part with the constant term halved.
pub fn plus_half(f: &LaurentPoly) -> LaurentPoly {
    let hi = f.hi().max(0);
    let mut out = f.window(0, hi);
    let c0 = out.coeff(0);
    out.set_coeff(0, c0 * 0.5);
    out
}

/// Entrywise [`plus_half`].
pub fn plus_half_matrix(f: &LaurentPolyMatrix) -> LaurentPolyMatrix {
    let mut out = f.window(0, f.hi().max(0));
    let c0 = out.coeff_or_zero(0).scale(Complex64::new(0.5, 0.0));
    *out.coeff_mut(0) = c0;
    out
}

/// `conj(ζ_j) = p_j / q` from `S⁺_[m-1] · (ζ_1, …, ζ_{m-1})* = col`, with
/// `q = det S⁺_[m-1]` and `p = Cof{S⁺_[m-1]}^T · col`.
pub fn zeta_cramer(
    sprev: &LaurentPolyMatrix,
    col: &LaurentPolyMatrix,
    det_method: DetMethod,
) -> Result<Vec<RationalCausal>> {
    if !sprev.is_square() || col.rows() != sprev.rows() || col.cols() != 1 {
        return Err(Error::Dimension("zeta_cramer needs an (m-1)-square factor and a column".into()));
    }
    let (q, cof) = match det_method {
        DetMethod::Direct => (polymat_det_direct(sprev), cofactor_transpose_direct(sprev)),
        DetMethod::Fft => {
            let q = polymat_det(sprev);
            let cof = cofactor_transpose(sprev, &q)?;
            (q, cof)
        }
    };
    let q = q.window(0, q.hi().max(0));
    let p = cof.mul(col);
    (0..sprev.rows()).map(|j| RationalCausal::new(p.entry(j, 0), q.clone())).collect()
}

/// Node-wise `ζ(t_l) = X_l*` with `S⁺_[m-1](t_l) X_l = col(t_l)`. Nodes whose
/// solve fails or has `rcond < rcond_min` reuse the previous node's solution
/// (node 0 takes the first valid successor). Returns the rows and the number
/// of nodes that fell back.
pub fn zeta_at_nodes(
    sprev_vals: &[ComplexMatrix],
    col_vals: &[Vec<Complex64>],
    rcond_min: f64,
) -> Result<(Vec<Vec<Complex64>>, usize)> {
    if sprev_vals.len() != col_vals.len() {
        return Err(Error::Dimension("node counts differ".into()));
    }
    let solved: Vec<Option<Vec<Complex64>>> = sprev_vals
        .par_iter()
        .zip(col_vals.par_iter())
        .map(|(a, b)| {
            let lu = lu_factor(a).ok()?;
            if lu.rcond() < rcond_min {
                return None;
            }
            let x = lu.solve_vec(b);
            x.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(x)
        })
        .collect();
    let first = solved.iter().position(Option::is_some).ok_or(Error::AllNodesSingular)?;
    let mut fallbacks = 0;
    let mut out = Vec::with_capacity(solved.len());
    let mut last = solved[first].clone().unwrap();
    for s in solved {
        match s {
            Some(x) => {
                last = x;
            }
            None => fallbacks += 1,
        }
        out.push(last.iter().map(|z| z.conj()).collect());
    }
    Ok((out, fallbacks))
}

/// `f_m⁺ = (det S_[m])⁺ / (det S_[m-1])⁺`.
pub fn fm_via_determinants(detm: &LaurentPoly, detm1: &LaurentPoly, params: &AlgoParams) -> Result<RationalCausal> {
    let p = scalar_factor(detm, params.scalar_grid, params.scalar_iters)?;
    let q = scalar_factor(detm1, params.scalar_grid, params.scalar_iters)?;
    RationalCausal::new(p, q)
}

/// `f_m` of degree `degree` from `|f_m(t_l)|² = s_mm(t_l) − Σ_j |ζ_j(t_l)|²`.
pub fn fm_via_power(
    smm: &LaurentPoly,
    zeta_vals: &[Vec<Complex64>],
    plan: &DftPlan,
    degree: usize,
) -> Result<LaurentPoly> {
    if zeta_vals.len() != plan.len() {
        return Err(Error::Dimension("one ζ row per grid node expected".into()));
    }
    let s = plan.eval_poly(smm);
    let tol = NEGATIVE_POWER_TOL * smm.sup_norm();
    let mut power = Vec::with_capacity(plan.len());
    for (node, (sv, z)) in s.iter().zip(zeta_vals).enumerate() {
        let v = sv.re - z.iter().map(|x| x.norm_sqr()).sum::<f64>();
        if v < -tol {
            return Err(Error::NegativePower { node, value: v });
        }
        power.push(v);
    }
    scalar_factor_explog(&DensitySamples::new(power, true)?, degree)
}
