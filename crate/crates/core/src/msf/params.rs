use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavelet::DeltaSolver;

/// Truncation parameter `N` as a function of the recursion index `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NSchedule {
    /// `N = round(factor · m · n)`.
    Proportional {
        factor: f64,
    },
    /// `N = round(factor · m)`.
    PerStep {
        factor: f64,
    },
    Constant {
        n: usize,
    },
    /// Explicit `m -> N`; steps missing from the table are an error.
    Table {
        table: BTreeMap<usize, usize>,
    },
}

impl NSchedule {
    pub fn truncation(&self, m: usize, n: usize) -> Result<usize> {
        let value = match self {
            NSchedule::Proportional { factor } => (factor * (m * n) as f64).round() as usize,
            NSchedule::PerStep { factor } => (factor * m as f64).round() as usize,
            NSchedule::Constant { n } => *n,
            NSchedule::Table { table } => {
                *table.get(&m).ok_or_else(|| Error::InvalidParams(format!("N schedule has no entry for m={m}")))?
            }
        };
        Ok(value.max(1))
    }

    fn validate(&self) -> Result<()> {
        match self {
            NSchedule::Proportional { factor } | NSchedule::PerStep { factor }
                if !(factor.is_finite() && *factor > 0.0) =>
            {
                Err(Error::InvalidParams(format!("N schedule factor {factor} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

/// How polynomial determinants are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetMethod {
    /// Node-wise LU on a DFT grid, then interpolation.
    #[default]
    Fft,
    /// Cofactor expansion with exact polynomial products (small orders only).
    Direct,
}

/// Lower bound on the default JLE-1 truncation; small-degree inputs with
/// boundary zeros need more terms than `5·m·n` provides.
pub const JLE1_MIN_TRUNCATION: usize = 40;

/// Largest order accepted by [`DetMethod::Direct`].
pub const DIRECT_DET_MAX_ORDER: usize = 8;

/// Source of `f_m⁺` in JLE-1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FmPath {
    /// Quotient of consecutive leading-minor factors.
    #[default]
    Determinants,
    /// Factor of `s_mm − Σ|ζ_j|²` on the `2^κ` grid.
    Power,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlgoParams {
    /// `None` selects the per-algorithm default (`max(5·m·n, 40)` for
    /// JLE-1, `ratio · 2^κ` for JLE-2).
    pub n_schedule: Option<NSchedule>,
    pub kappa: u32,
    pub ratio: f64,
    pub scalar_iters: usize,
    pub wilson_iters: usize,
    /// Grid size for scalar factorizations in JLE-1 and JLE-3.
    pub scalar_grid: usize,
    pub det_method: DetMethod,
    pub fm_path: FmPath,
    pub delta_solver: DeltaSolver,
    /// Node-solve threshold below which JLE-2 reuses the previous node.
    pub node_rcond_min: f64,
    /// Threshold below which the JLE-3 system is rejected.
    pub delta_rcond_min: f64,
}

impl Default for AlgoParams {
    fn default() -> Self {
        AlgoParams {
            n_schedule: None,
            kappa: 12,
            ratio: 1.0 / 16.0,
            scalar_iters: 5,
            wilson_iters: 20,
            scalar_grid: 2048,
            det_method: DetMethod::Fft,
            fm_path: FmPath::Determinants,
            delta_solver: DeltaSolver::Dense,
            node_rcond_min: 1e-12,
            delta_rcond_min: 1e-12,
        }
    }
}

impl AlgoParams {
    pub fn validate(&self) -> Result<()> {
        if !(10..=23).contains(&self.kappa) {
            return Err(Error::InvalidParams(format!("kappa {} outside 10..=23", self.kappa)));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidParams(format!("ratio {} outside (0, 1)", self.ratio)));
        }
        if self.scalar_grid < 2 {
            return Err(Error::InvalidParams("scalar grid needs at least 2 nodes".into()));
        }
        if let Some(s) = &self.n_schedule {
            s.validate()?;
        }
        Ok(())
    }

    pub fn grid_size(&self) -> usize {
        1usize << self.kappa
    }

    /// JLE-1 truncation at step `m`.
    pub(crate) fn jle1_truncation(&self, m: usize, n: usize) -> Result<usize> {
        match &self.n_schedule {
            Some(s) => s.truncation(m, n),
            None => Ok((5 * m * n).max(JLE1_MIN_TRUNCATION)),
        }
    }

    /// JLE-2 truncation at step `m`, clamped so `N + n` fits the grid.
    pub(crate) fn jle2_truncation(&self, m: usize, n: usize) -> Result<usize> {
        let k = self.grid_size();
        let raw = match &self.n_schedule {
            Some(s) => s.truncation(m, n)?,
            None => ((self.ratio * k as f64).round() as usize).max(1),
        };
        if n + 1 >= k {
            return Err(Error::InvalidParams(format!("grid 2^{} too small for degree {n}", self.kappa)));
        }
        Ok(raw.min(k - n - 1).max(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let p = AlgoParams::default();
        p.validate().unwrap();
        assert_eq!(p.jle1_truncation(3, 4).unwrap(), 60);
        assert_eq!(p.jle1_truncation(2, 1).unwrap(), JLE1_MIN_TRUNCATION);
        assert_eq!(p.jle2_truncation(2, 10).unwrap(), 256);
    }

    #[test]
    fn kappa_bounds() {
        let p = AlgoParams { kappa: 9, ..Default::default() };
        assert!(p.validate().is_err());
        let p = AlgoParams { kappa: 24, ..Default::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn jle2_truncation_is_clamped() {
        let p = AlgoParams { kappa: 10, n_schedule: Some(NSchedule::Constant { n: 5000 }), ..Default::default() };
        assert_eq!(p.jle2_truncation(2, 24).unwrap(), 1024 - 25);
    }

    #[test]
    fn table_schedule() {
        let s = NSchedule::Table { table: [(2, 40), (3, 80)].into_iter().collect() };
        assert_eq!(s.truncation(3, 1).unwrap(), 80);
        assert!(s.truncation(4, 1).is_err());
    }

    #[test]
    fn params_round_trip_through_json() {
        let p = AlgoParams { n_schedule: Some(NSchedule::PerStep { factor: 100.0 }), ..Default::default() };
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<AlgoParams>(&s).unwrap(), p);
    }
}
