use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numcore::LaurentPolyMatrix;
use crate::wavelet::{build_wavelet, unitary_defect, DeltaSolver, LastRowData};

/// Measurements taken while building one recursion step.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct StepInfo {
    pub rcond_v0: f64,
    pub unitary_defect: f64,
    pub det_defect: f64,
    /// Largest coefficient dropped from the indices `[-n, -1]` and `[n+1, 2n]`.
    pub truncated_mass: f64,
}

/// `F_m` with `S⁺_[m-1]` in the upper-left block and `row` as the last row.
fn stacked(sprev: &LaurentPolyMatrix, row: &LastRowData) -> LaurentPolyMatrix {
    let m = row.m;
    let lo = row.zeta.iter().map(|z| z.lo()).min().unwrap_or(0).min(0);
    let hi = row.zeta.iter().map(|z| z.hi()).chain([row.fm.hi(), sprev.hi()]).max().unwrap();
    let mut f = LaurentPolyMatrix::zeros(m, m, lo, hi);
    for k in sprev.lo()..=sprev.hi() {
        let c = sprev.coeff(k).unwrap();
        let dst = f.coeff_mut(k);
        for i in 0..m - 1 {
            for j in 0..m - 1 {
                dst[(i, j)] = c[(i, j)];
            }
        }
    }
    for (j, z) in row.zeta.iter().enumerate() {
        f.set_entry(m - 1, j, z);
    }
    f.set_entry(m - 1, m - 1, &row.fm);
    f
}

/// `S⁺_[m]`: the causal part on `[0, n]` of `[S⁺_[m-1] ⊕ row] · U_m`.
pub fn recursion_step(
    sprev: &LaurentPolyMatrix,
    row: &LastRowData,
    n: usize,
    solver: DeltaSolver,
) -> Result<(LaurentPolyMatrix, StepInfo)> {
    let w = build_wavelet(row, solver)?;
    let (ud, dd) = unitary_defect(&w.u, 4 * row.n_trunc.max(1));
    let f = stacked(sprev, row);
    let n = n as i64;
    let full = f.mul_window(&w.u, -n, 2 * n);
    let mut mass: f64 = 0.0;
    for k in (-n..0).chain(n + 1..=2 * n) {
        mass = mass.max(full.coeff(k).map_or(0.0, |c| c.max_abs()));
    }
    Ok((full.window(0, n), StepInfo { rcond_v0: w.rcond_v0, unitary_defect: ud, det_defect: dd, truncated_mass: mass }))
}
