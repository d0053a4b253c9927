use crate::error::{Error, Result};
use crate::numcore::linalg::{lu_factor, unitary_polar_factor};
use crate::numcore::{ComplexMatrix, LaurentPolyMatrix};

/// The unitary `U = A⁻¹ √(A A*)` with `A = S⁺(0)`.
pub fn unitary_at_zero(s0plus: &LaurentPolyMatrix) -> Result<ComplexMatrix> {
    let a0 = s0plus.coeff_or_zero(0);
    lu_factor(&a0).map_err(|_| Error::SingularAtZero)?;
    Ok(unitary_polar_factor(&a0)?.adjoint())
}

/// `S⁺ U` with `U` from [`unitary_at_zero`], so the constant coefficient
/// becomes Hermitian positive definite.
pub fn normalize_at_zero(s0plus: &LaurentPolyMatrix) -> Result<LaurentPolyMatrix> {
    Ok(s0plus.mul_const(&unitary_at_zero(s0plus)?))
}
