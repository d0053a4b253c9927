//! Matrix spectral factorization: the three wavelet-recursion variants (JLE-1,
//! JLE-2, JLE-3) and Wilson's iteration.

mod jle1;
mod jle2;
mod jle3;
mod normalize;
mod params;
mod recursion;
mod shortcut;
mod wilson;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use jle1::jle1;
pub use jle2::jle2;
pub use jle3::jle3;
pub use jle3::DET_BOUNDARY_TOL;
pub use normalize::{normalize_at_zero, unitary_at_zero};
pub use params::{AlgoParams, DetMethod, FmPath, NSchedule, DIRECT_DET_MAX_ORDER, JLE1_MIN_TRUNCATION};
pub use recursion::{recursion_step, StepInfo};
pub use shortcut::{
    fm_via_determinants, fm_via_power, plus_half, plus_half_matrix, zeta_at_nodes, zeta_cramer, NEGATIVE_POWER_TOL,
};
pub use wilson::wilson;

use crate::error::{Error, Result};
use crate::numcore::LaurentPolyMatrix;

/// Relative Hermitian-symmetry tolerance for input densities.
pub const DENSITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Jle1,
    Jle2,
    Jle3,
    Wilson,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Jle1, Algorithm::Jle2, Algorithm::Jle3, Algorithm::Wilson];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Jle1 => "jle1",
            Algorithm::Jle2 => "jle2",
            Algorithm::Jle3 => "jle3",
            Algorithm::Wilson => "wilson",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown algorithm `{s}`")))
    }
}

/// One recursion step (or one Wilson iteration) as seen from outside.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct StepRecord {
    pub m: usize,
    pub n_trunc: Option<usize>,
    pub rcond_v0: Option<f64>,
    pub unitary_defect: Option<f64>,
    pub det_defect: Option<f64>,
    pub truncated_mass: Option<f64>,
    pub fallback_nodes: Option<usize>,
    /// `‖S_[m] − S⁺_[m] (S⁺_[m])*‖` after the step.
    pub residual: f64,
    pub time_s: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub algorithm: String,
    pub params: AlgoParams,
    pub steps: Vec<StepRecord>,
    pub warnings: Vec<String>,
    /// Reciprocal condition estimate of the JLE-3 system.
    pub rcond_delta: Option<f64>,
    pub iterations: Option<usize>,
    pub time_s: f64,
}

/// Canonical causal factor on `[0, n]`, its residual and the run record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorResult {
    pub splus: LaurentPolyMatrix,
    pub err: f64,
    pub diagnostics: Diagnostics,
}

pub fn factorize(alg: Algorithm, s: &LaurentPolyMatrix, params: &AlgoParams) -> Result<FactorResult> {
    match alg {
        Algorithm::Jle1 => jle1(s, params),
        Algorithm::Jle2 => jle2(s, params),
        Algorithm::Jle3 => jle3(s, params),
        Algorithm::Wilson => wilson(s, params),
    }
}

/// Checks squareness and Hermitian symmetry; returns the density on its
/// symmetric window `[-n, n]` together with `n`.
pub(crate) fn prepare_density(s: &LaurentPolyMatrix) -> Result<(LaurentPolyMatrix, usize)> {
    if !s.is_square() || s.rows() == 0 {
        return Err(Error::Dimension(format!("density must be square, got {}x{}", s.rows(), s.cols())));
    }
    let defect = s.hermitian_defect();
    if defect > DENSITY_TOL * s.sup_norm().max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian { asymmetry: defect });
    }
    let n = s.half_width();
    Ok((s.window(-(n as i64), n as i64), n))
}

/// Normalizes the raw factor and packages the result.
pub(crate) fn finish(
    s: &LaurentPolyMatrix,
    raw: &LaurentPolyMatrix,
    n: usize,
    mut diagnostics: Diagnostics,
    start: std::time::Instant,
) -> Result<FactorResult> {
    let splus = normalize_at_zero(&raw.window(0, n as i64))?;
    let err = crate::harness::factorization_error(s, &splus);
    diagnostics.time_s = start.elapsed().as_secs_f64();
    Ok(FactorResult { splus, err, diagnostics })
}
