//! JSON coefficient files.
//!
//! ```json
//! {"format": "specfact-coeffs/1", "r": 2, "cols": 2, "lo": -1, "hi": 1,
//!  "coeffs": [[[[re, im], [re, im]], [[re, im], [re, im]]], ...]}
//! ```
//!
//! `coeffs[k - lo][i][j]` is entry `(i, j)` of the coefficient at index `k`.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::msf::DENSITY_TOL;
use crate::numcore::{ComplexMatrix, LaurentPolyMatrix};

pub const FORMAT_TAG: &str = "specfact-coeffs/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientFile {
    pub format: String,
    pub r: usize,
    pub cols: usize,
    pub lo: i64,
    pub hi: i64,
    pub coeffs: Vec<Vec<Vec<[f64; 2]>>>,
}

impl CoefficientFile {
    pub fn from_matrix(p: &LaurentPolyMatrix) -> Self {
        let coeffs = p
            .coeff_matrices()
            .iter()
            .map(|c| (0..c.rows()).map(|i| (0..c.cols()).map(|j| [c[(i, j)].re, c[(i, j)].im]).collect()).collect())
            .collect();
        CoefficientFile { format: FORMAT_TAG.to_string(), r: p.rows(), cols: p.cols(), lo: p.lo(), hi: p.hi(), coeffs }
    }

    /// Checks the tag and every declared shape, then builds the matrix.
    pub fn to_matrix(&self) -> Result<LaurentPolyMatrix> {
        if self.format != FORMAT_TAG {
            return Err(Error::Schema(format!("format tag `{}`, expected `{FORMAT_TAG}`", self.format)));
        }
        if self.hi < self.lo {
            return Err(Error::Schema(format!("hi={} below lo={}", self.hi, self.lo)));
        }
        let len = (self.hi - self.lo + 1) as usize;
        if self.coeffs.len() != len {
            return Err(Error::Schema(format!(
                "{} coefficients for window [{}, {}]",
                self.coeffs.len(),
                self.lo,
                self.hi
            )));
        }
        let mut mats = Vec::with_capacity(len);
        for (k, rows) in self.coeffs.iter().enumerate() {
            let index = self.lo + k as i64;
            if rows.len() != self.r || rows.iter().any(|row| row.len() != self.cols) {
                return Err(Error::Schema(format!("coefficient {index} is not {}x{}", self.r, self.cols)));
            }
            let data: Vec<Complex64> = rows.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect();
            if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Schema(format!("coefficient {index} has a non-finite entry")));
            }
            mats.push(ComplexMatrix::from_vec(self.r, self.cols, data)?);
        }
        if mats.is_empty() || self.r == 0 || self.cols == 0 {
            return Err(Error::Schema("empty matrix".into()));
        }
        LaurentPolyMatrix::new(self.lo, mats).map_err(|e| Error::Schema(e.to_string()))
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

pub fn parse(text: &str) -> Result<LaurentPolyMatrix> {
    let file: CoefficientFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    file.to_matrix()
}

pub fn to_json(p: &LaurentPolyMatrix) -> String {
    serde_json::to_string(&CoefficientFile::from_matrix(p)).expect("coefficient file serializes")
}

pub fn load(path: &Path) -> Result<LaurentPolyMatrix> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse(&text).map_err(|e| match e {
        Error::Schema(msg) => Error::Schema(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Loads a density and rejects non-square or non-Hermitian data.
pub fn load_density(path: &Path) -> Result<LaurentPolyMatrix> {
    let s = load(path)?;
    check_density(&s).map_err(|msg| Error::Schema(format!("{}: {msg}", path.display())))?;
    Ok(s)
}

/// Loads a factor, which must be causal (`lo = 0`).
pub fn load_factor(path: &Path) -> Result<LaurentPolyMatrix> {
    let p = load(path)?;
    if p.lo() != 0 {
        return Err(Error::Schema(format!("{}: factor window starts at {}, expected 0", path.display(), p.lo())));
    }
    Ok(p)
}

pub fn save(path: &Path, p: &LaurentPolyMatrix) -> Result<()> {
    fs::write(path, to_json(p)).map_err(|e| io_error(path, e))
}

fn check_density(s: &LaurentPolyMatrix) -> std::result::Result<(), String> {
    if !s.is_square() {
        return Err(format!("density is {}x{}, expected square", s.rows(), s.cols()));
    }
    let defect = s.hermitian_defect();
    if defect > DENSITY_TOL * s.sup_norm().max(f64::MIN_POSITIVE) {
        return Err(format!("density is not Hermitian (asymmetry {defect:.3e})"));
    }
    Ok(())
}
