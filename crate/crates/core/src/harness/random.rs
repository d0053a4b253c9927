use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::rng::UniformSource;
use crate::error::{Error, Result};
use crate::numcore::{ComplexMatrix, LaurentPolyMatrix};

/// Random family `A(t)A*(t) + shift·I` with `A(t) = Σ_{k=0}^{n} A_k t^k`
/// and real entries of `A_k` uniform on `[-1, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFamilySpec {
    pub r: usize,
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub shift: f64,
}

impl MatrixFamilySpec {
    pub fn new(r: usize, n: usize, seed: u64) -> Self {
        MatrixFamilySpec { r, n, seed, shift: 0.0 }
    }

    pub fn with_shift(self, shift: f64) -> Self {
        MatrixFamilySpec { shift, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::InvalidParams("random family needs r >= 1".into()));
        }
        if !(self.shift.is_finite() && self.shift >= 0.0) {
            return Err(Error::InvalidParams(format!("shift {} must be nonnegative", self.shift)));
        }
        Ok(())
    }
}

/// The causal generator `A(t)`. Entries are drawn in the order
/// coefficient index, row, column.
pub fn random_causal(spec: &MatrixFamilySpec) -> LaurentPolyMatrix {
    let mut src = UniformSource::new(spec.seed);
    let coeffs = (0..=spec.n)
        .map(|_| ComplexMatrix::from_fn(spec.r, spec.r, |_, _| Complex64::new(src.symmetric(), 0.0)))
        .collect();
    LaurentPolyMatrix::new(0, coeffs).expect("square blocks of equal size")
}

pub fn random_spd(spec: &MatrixFamilySpec) -> Result<LaurentPolyMatrix> {
    spec.validate()?;
    let a = random_causal(spec);
    let mut s = a.mul(&a.adjoint());
    if spec.shift != 0.0 {
        let c0 = s.coeff_mut(0);
        for i in 0..spec.r {
            c0[(i, i)] += spec.shift;
        }
    }
    Ok(s)
}
