//! Dense complex linear algebra, DFT machinery and Laurent-polynomial
//! matrix arithmetic.

pub mod dft;
pub mod laurent;
pub mod linalg;
pub mod matrix;
pub mod polydet;

pub use dft::{dft_eval, idft_interpolate, next_pow2, unit_roots, DftPlan};
pub use laurent::{LaurentPoly, LaurentPolyMatrix};
pub use linalg::{
    cholesky_factor, hermitian_eigh, hermitian_principal_sqrt, lu_factor, lu_solve, toeplitz_lower, LuFactor,
};
pub use matrix::ComplexMatrix;
pub use polydet::{cofactor_transpose, cofactor_transpose_direct, polymat_det, polymat_det_direct};

/// `P·Q` over the full product window.
pub fn laurent_mul(p: &LaurentPolyMatrix, q: &LaurentPolyMatrix) -> LaurentPolyMatrix {
    p.mul(q)
}

/// `P*(t)`.
pub fn laurent_adjoint(p: &LaurentPolyMatrix) -> LaurentPolyMatrix {
    p.adjoint()
}
