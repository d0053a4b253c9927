use std::time::Instant;

use super::params::AlgoParams;
use super::recursion::recursion_step;
use super::shortcut::{fm_via_power, zeta_at_nodes};
use super::{finish, prepare_density, Diagnostics, FactorResult, StepRecord};
use crate::error::Result;
use crate::harness::factorization_error;
use crate::numcore::dft::dft_eval_with;
use crate::numcore::{DftPlan, LaurentPoly, LaurentPolyMatrix};
use crate::scalarfact::scalar_factor;
use crate::wavelet::LastRowData;

const NAME: &str = "jle2";

/// JLE-2: `ζ_j` from node-wise solves and `f_m` from the power balance, all
/// on one `2^κ` grid.
pub fn jle2(s: &LaurentPolyMatrix, params: &AlgoParams) -> Result<FactorResult> {
    let start = Instant::now();
    params.validate()?;
    let (s, n) = prepare_density(s)?;
    let r = s.rows();
    let k = params.grid_size();
    let plan = DftPlan::new(k);
    let mut diag = Diagnostics { algorithm: NAME.into(), params: params.clone(), ..Default::default() };

    let t0 = Instant::now();
    let f1 = scalar_factor(&s.entry(0, 0), k, params.scalar_iters)
        .map_err(|e| e.at_step(NAME, 1, "scalar factor of s_11"))?;
    let mut splus = LaurentPolyMatrix::from_entries(1, 1, &[f1.window(0, n as i64)])?;
    diag.steps.push(StepRecord {
        m: 1,
        residual: factorization_error(&s.leading(1), &splus),
        time_s: t0.elapsed().as_secs_f64(),
        ..Default::default()
    });

    for m in 2..=r {
        let t0 = Instant::now();
        let nt = params.jle2_truncation(m, n)?;
        let sprev_vals = dft_eval_with(&plan, &splus);
        let col_vals: Vec<Vec<_>> =
            dft_eval_with(&plan, &s.block(0, m - 1, m - 1, 1)).iter().map(|c| c.column(0)).collect();
        let (zvals, fallbacks) = zeta_at_nodes(&sprev_vals, &col_vals, params.node_rcond_min)
            .map_err(|e| e.at_step(NAME, m, "node solves for zeta"))?;
        let fm = fm_via_power(&s.entry(m - 1, m - 1), &zvals, &plan, nt + n)
            .map_err(|e| e.at_step(NAME, m, "scalar factor of |f_m|^2"))?;
        let zeta: Vec<LaurentPoly> = (0..m - 1)
            .map(|j| {
                let v: Vec<_> = zvals.iter().map(|row| row[j]).collect();
                plan.interpolate(&v, -(nt as i64), n as i64)
            })
            .collect::<Result<_>>()
            .map_err(|e| e.at_step(NAME, m, "zeta coefficients"))?;
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
            fallback_nodes: Some(fallbacks),
            residual: factorization_error(&s.leading(m), &splus),
            time_s: t0.elapsed().as_secs_f64(),
        });
    }
    finish(&s, &splus, n, diag, start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{random_spd, MatrixFamilySpec};

    #[test]
    fn diagonal_density_gives_scalar_factors() {
        let d1 = LaurentPoly::from_real(-1, &[2.0, 5.0, 2.0]);
        let d2 = LaurentPoly::from_real(-1, &[3.0, 10.0, 3.0]);
        let z = LaurentPoly::zeros(0, 0);
        let s = LaurentPolyMatrix::from_entries(2, 2, &[d1, z.clone(), z, d2]).unwrap();
        let res = jle2(&s, &AlgoParams { kappa: 10, ..Default::default() }).unwrap();
        assert!(res.splus.entry(0, 0).sub(&LaurentPoly::from_real(0, &[2.0, 1.0])).sup_norm() < 1e-10);
        assert!(res.splus.entry(1, 1).sub(&LaurentPoly::from_real(0, &[3.0, 1.0])).sup_norm() < 1e-10);
        assert!(res.splus.entry(1, 0).sup_norm() < 1e-10);
        assert!(res.err < 1e-10);
    }

    #[test]
    fn random_ten_by_ten() {
        // The default ratio (N = 256) leaves about half of the 10x10 seeds above 1e-4.
        let s = random_spd(&MatrixFamilySpec::new(10, 10, 1)).unwrap();
        let params = AlgoParams { kappa: 12, ratio: 0.25, ..Default::default() };
        let res = jle2(&s, &params).unwrap();
        assert!(res.err <= 1e-4, "{}", res.err);
        assert_eq!(res.diagnostics.steps[1].n_trunc, Some(1024));
        assert_eq!(res.diagnostics.steps.len(), 10);
        assert!(res.diagnostics.steps.iter().all(|st| st.residual.is_finite()));
    }

    #[test]
    fn rejects_small_grids() {
        let s = random_spd(&MatrixFamilySpec::new(2, 1, 0)).unwrap();
        assert!(jle2(&s, &AlgoParams { kappa: 5, ..Default::default() }).is_err());
    }
}
