//! Test-matrix generation, fixtures, the residual metric and the benchmark
//! runner.

mod bench;
mod fixtures;
mod random;
mod rng;

pub use bench::{
    preset, run_bench, singular_jle1, sweep, table1_jle1, table1_wilson, table2_jle1, table2_wilson, write_jsonl,
    BenchCase, BenchConfig, BenchInput, BenchRow, BenchRun, PRESET_NAMES,
};
pub use fixtures::{fixture, Fixture, FIXTURE_NAMES};
pub use random::{random_causal, random_spd, MatrixFamilySpec};
pub use rng::UniformSource;

use crate::numcore::LaurentPolyMatrix;

/// `‖S − S⁺ (S⁺)*‖`: largest coefficient modulus over the union of both
/// windows.
pub fn factorization_error(s: &LaurentPolyMatrix, splus: &LaurentPolyMatrix) -> f64 {
    s.sub(&splus.mul(&splus.adjoint())).sup_norm()
}
