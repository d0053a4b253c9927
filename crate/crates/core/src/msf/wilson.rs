use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use super::params::AlgoParams;
use super::{finish, prepare_density, Diagnostics, FactorResult, StepRecord};
use crate::error::{Error, Result};
use crate::harness::factorization_error;
use crate::numcore::dft::dft_eval_with;
use crate::numcore::linalg::{hermitian_principal_sqrt, lu_factor};
use crate::numcore::{ComplexMatrix, DftPlan, LaurentPolyMatrix};

const NAME: &str = "wilson";

/// Relative change of the residual over three iterations below which the
/// iteration stops.
pub const STAGNATION_TOL: f64 = 1e-2;

/// Applies `plus_half` to every entry of a grid function.
fn project_causal(plan: &DftPlan, vals: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let k = plan.len();
    let (rows, cols) = (vals[0].rows(), vals[0].cols());
    let mut out = vec![ComplexMatrix::zeros(rows, cols); k];
    let mut buf = vec![Complex64::new(0.0, 0.0); k];
    for i in 0..rows {
        for j in 0..cols {
            for (b, v) in buf.iter_mut().zip(vals) {
                *b = v[(i, j)];
            }
            let mut spec = plan.spectrum(&buf);
            spec[0] *= 0.5;
            for c in spec[k.div_ceil(2)..].iter_mut() {
                *c = Complex64::new(0.0, 0.0);
            }
            for (o, v) in out.iter_mut().zip(plan.synthesize(&spec)) {
                o[(i, j)] = v;
            }
        }
    }
    out
}

/// Coefficients `0..=n` of a grid function.
fn truncate(plan: &DftPlan, vals: &[ComplexMatrix], n: usize) -> Result<LaurentPolyMatrix> {
    let full = crate::numcore::dft::idft_interpolate_with(plan, vals, 0, plan.len() as i64 - 1)?;
    Ok(full.window(0, n as i64))
}

/// Wilson's iteration `S⁺ ← S⁺ [ (S⁺)⁻¹ S (S⁺)⁻* + I ]⁺` on the `2^κ` grid,
/// started from the Hermitian square root of the constant coefficient. Each
/// iterate is cut back to degree `n` before the next step.
pub fn wilson(s: &LaurentPolyMatrix, params: &AlgoParams) -> Result<FactorResult> {
    let start = Instant::now();
    params.validate()?;
    let (s, n) = prepare_density(s)?;
    let r = s.rows();
    let plan = DftPlan::new(params.grid_size());
    let mut diag = Diagnostics { algorithm: NAME.into(), params: params.clone(), ..Default::default() };
    let at = |it: usize, step| move |e: Error| e.at_step(NAME, it, step);

    let s_vals = dft_eval_with(&plan, &s);
    let root = hermitian_principal_sqrt(&s.coeff_or_zero(0)).map_err(at(0, "square root of C_0"))?;
    lu_factor(&root)
        .map_err(|_| Error::NotPositiveDefinite { index: 0, pivot: 0.0 }.at_step(NAME, 0, "square root of C_0"))?;
    let mut cur = vec![root.clone(); plan.len()];
    let initial = LaurentPolyMatrix::constant(root).window(0, n as i64);
    let err0 = factorization_error(&s, &initial);
    let mut best = (err0, initial);
    let mut history = vec![err0];
    let mut increases = 0;
    let id = ComplexMatrix::identity(r);

    for it in 1..=params.wilson_iters {
        let t0 = Instant::now();
        let g: Vec<ComplexMatrix> = cur
            .par_iter()
            .zip(s_vals.par_iter())
            .enumerate()
            .map(|(node, (sk, sv))| {
                let lu = lu_factor(sk).map_err(|_| Error::SingularNode { node })?;
                let x = lu.solve(sv);
                let y = lu.solve(&x.adjoint());
                Ok(&y.adjoint() + &id)
            })
            .collect::<Result<_>>()
            .map_err(at(it, "inverse of the current iterate"))?;
        let t = project_causal(&plan, &g);
        cur = cur.par_iter().zip(t.par_iter()).map(|(a, b)| a.matmul(b)).collect();

        // Restarting from the degree-n truncation keeps the exact factor the
        // only fixed point; the grid alone admits nearby aliased ones.
        let trunc = truncate(&plan, &cur, n)?;
        cur = dft_eval_with(&plan, &trunc);
        let err = factorization_error(&s, &trunc);
        if !err.is_finite() {
            return Err(Error::Divergence { iteration: it, residual: err }.at_step(NAME, it, "update"));
        }
        diag.steps.push(StepRecord { m: it, residual: err, time_s: t0.elapsed().as_secs_f64(), ..Default::default() });
        let prev = *history.last().unwrap();
        history.push(err);
        if err > prev {
            increases += 1;
            if increases >= 3 && err > err0 {
                return Err(Error::Divergence { iteration: it, residual: err }.at_step(NAME, it, "update"));
            }
        } else {
            increases = 0;
        }
        if err < best.0 {
            best = (err, trunc);
        }
        diag.iterations = Some(it);
        if it >= 3 {
            let old = history[it - 3];
            if (err - old).abs() <= STAGNATION_TOL * old {
                break;
            }
        }
    }
    finish(&s, &best.1, n, diag, start)
}
