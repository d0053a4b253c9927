use std::time::Instant;

use rayon::prelude::*;

use super::params::{AlgoParams, DetMethod, FmPath, DIRECT_DET_MAX_ORDER};
use super::recursion::recursion_step;
use super::shortcut::{fm_via_power, zeta_cramer};
use super::{finish, prepare_density, Diagnostics, FactorResult, StepRecord};
use crate::error::{Error, Result};
use crate::harness::factorization_error;
use crate::numcore::polydet::envelope_warning;
use crate::numcore::{polymat_det, polymat_det_direct, DftPlan, LaurentPoly, LaurentPolyMatrix};
use crate::scalarfact::{causal_expand, scalar_factor, RationalCausal};
use crate::wavelet::LastRowData;

const NAME: &str = "jle1";

/// Leading-minor determinants `det S_[1], …, det S_[r]`.
pub(crate) fn leading_determinants(s: &LaurentPolyMatrix, method: DetMethod) -> Vec<LaurentPoly> {
    (1..=s.rows())
        .into_par_iter()
        .map(|m| {
            let sm = s.leading(m);
            match method {
                DetMethod::Fft => polymat_det(&sm),
                DetMethod::Direct => polymat_det_direct(&sm),
            }
        })
        .collect()
}

/// JLE-1: all `f_m⁺` from determinant factors, `ζ_j` by Cramer's rule,
/// then one wavelet step per row.
pub fn jle1(s: &LaurentPolyMatrix, params: &AlgoParams) -> Result<FactorResult> {
    let start = Instant::now();
    params.validate()?;
    let (s, n) = prepare_density(s)?;
    let r = s.rows();
    if params.det_method == DetMethod::Direct && r > DIRECT_DET_MAX_ORDER {
        return Err(Error::InvalidParams(format!(
            "direct determinants are limited to order {DIRECT_DET_MAX_ORDER}, got {r}"
        )));
    }
    let mut diag = Diagnostics { algorithm: NAME.into(), params: params.clone(), ..Default::default() };
    diag.warnings.extend(envelope_warning(r, n));

    let dets = leading_determinants(&s, params.det_method);
    let factors: Vec<LaurentPoly> = dets
        .par_iter()
        .enumerate()
        .map(|(i, d)| {
            scalar_factor(d, params.scalar_grid, params.scalar_iters)
                .map_err(|e| e.at_step(NAME, i + 1, "scalar factor of det S_[m]"))
        })
        .collect::<Result<_>>()?;

    let t0 = Instant::now();
    let mut splus = LaurentPolyMatrix::from_entries(1, 1, &[factors[0].window(0, n as i64)])?;
    diag.steps.push(StepRecord {
        m: 1,
        residual: factorization_error(&s.leading(1), &splus),
        time_s: t0.elapsed().as_secs_f64(),
        ..Default::default()
    });

    for m in 2..=r {
        let t0 = Instant::now();
        let nt = params.jle1_truncation(m, n)?;
        let (ni, nti) = (n as i64, nt as i64);
        let col = s.block(0, m - 1, m - 1, 1);
        let conj_zeta =
            zeta_cramer(&splus, &col, params.det_method).map_err(|e| e.at_step(NAME, m, "Cramer's rule for zeta"))?;
        let zeta: Vec<LaurentPoly> = conj_zeta
            .par_iter()
            .map(|z| causal_expand(z, -ni, nti).map(|c| c.adjoint()))
            .collect::<Result<_>>()
            .map_err(|e| e.at_step(NAME, m, "expansion of zeta"))?;
        let fm = match params.fm_path {
            FmPath::Determinants => {
                let f = RationalCausal::new(factors[m - 1].clone(), factors[m - 2].clone())?;
                causal_expand(&f, 0, nti + ni)
            }
            FmPath::Power => {
                let k = params.grid_size();
                if nt + n >= k {
                    return Err(Error::InvalidParams(format!(
                        "N + n = {} does not fit the 2^{} grid",
                        nt + n,
                        params.kappa
                    )));
                }
                let plan = DftPlan::new(k);
                let vals: Vec<Vec<_>> = {
                    let per_j: Vec<Vec<_>> = zeta.iter().map(|z| plan.eval_poly(z)).collect();
                    (0..k).map(|l| per_j.iter().map(|v| v[l]).collect()).collect()
                };
                fm_via_power(&s.entry(m - 1, m - 1), &vals, &plan, nt + n)
            }
        }
        .map_err(|e| e.at_step(NAME, m, "f_m"))?;
        let row = LastRowData::new(nt, zeta, fm)?;
        let (next, info) =
            recursion_step(&splus, &row, n, params.delta_solver).map_err(|e| e.at_step(NAME, m, "wavelet step"))?;
        splus = next;
        diag.steps.push(StepRecord {
            m,
            n_trunc: Some(nt),
            rcond_v0: Some(info.rcond_v0),
            unitary_defect: Some(info.unitary_defect),
            det_defect: Some(info.det_defect),
            truncated_mass: Some(info.truncated_mass),
            fallback_nodes: None,
            residual: factorization_error(&s.leading(m), &splus),
            time_s: t0.elapsed().as_secs_f64(),
        });
    }
    finish(&s, &splus, n, diag, start)
}
