//! Property checks shared by the proptest suite and the acceptance runner.
//! Each returns the measured defect so callers pick the tolerance.

#![allow(dead_code)]

use specfact::harness::{random_spd, MatrixFamilySpec, UniformSource};
use specfact::msf::{
    factorize, normalize_at_zero, plus_half_matrix, zeta_at_nodes, zeta_cramer, AlgoParams, Algorithm, DetMethod,
};
use specfact::numcore::dft::dft_eval_with;
use specfact::numcore::linalg::hermitian_eigh;
use specfact::numcore::{polymat_det, unit_roots, ComplexMatrix, DftPlan, LaurentPoly, LaurentPolyMatrix};
use specfact::wavelet::{
    build_wavelet, causality_defect, delta_matrix, solve_delta, unitary_defect, DeltaSolver, LastRowData,
};
use specfact::{harness, Complex64};

pub struct Draw(UniformSource);

impl Draw {
    pub fn new(seed: u64) -> Self {
        Draw(UniformSource::new(seed))
    }

    pub fn real(&mut self) -> f64 {
        self.0.symmetric()
    }

    pub fn complex(&mut self) -> Complex64 {
        Complex64::new(self.real(), self.real())
    }
}

/// `r × c` matrix with complex entries from `[-1, 1]²` on `[lo, hi]`.
pub fn random_matrix(draw: &mut Draw, r: usize, c: usize, lo: i64, hi: i64) -> LaurentPolyMatrix {
    let mats = (lo..=hi).map(|_| ComplexMatrix::from_fn(r, c, |_, _| draw.complex())).collect();
    LaurentPolyMatrix::new(lo, mats).unwrap()
}

/// `‖det(PQ) − det P · det Q‖ / (‖det P‖ ‖det Q‖)` for random causal `P, Q`.
pub fn det_multiplicativity(r: usize, n: usize, seed: u64) -> f64 {
    let mut d = Draw::new(seed);
    let p = random_matrix(&mut d, r, r, 0, n as i64);
    let q = random_matrix(&mut d, r, r, 0, n as i64);
    let (dp, dq) = (polymat_det(&p), polymat_det(&q));
    let lhs = polymat_det(&p.mul(&q));
    lhs.sub(&dp.mul(&dq)).sup_norm() / (dp.sup_norm() * dq.sup_norm())
}

/// Last row with geometrically decaying `ζ_j` and an `f_m` dominated by its
/// constant term.
pub fn random_row(m: usize, n: usize, n_trunc: usize, seed: u64) -> LastRowData {
    let mut d = Draw::new(seed);
    let zeta = (0..m - 1)
        .map(|_| {
            let coeffs =
                (-(n_trunc as i64)..=n as i64).map(|k| d.complex() * 0.7f64.powi(k.unsigned_abs() as i32)).collect();
            LaurentPoly::new(-(n_trunc as i64), coeffs)
        })
        .collect();
    let mut fm: Vec<Complex64> = (0..=n_trunc + n).map(|k| d.complex() * 0.3 * 0.5f64.powi(k as i32)).collect();
    fm[0] = Complex64::new(2.0, 0.0);
    LastRowData::new(n_trunc, zeta, LaurentPoly::new(0, fm)).unwrap()
}

/// Largest of the unitary, determinant and causality defects of one wavelet
/// matrix.
pub fn wavelet_defects(m: usize, n: usize, n_trunc: usize, seed: u64, solver: DeltaSolver) -> [f64; 3] {
    let row = random_row(m, n, n_trunc, seed);
    let w = build_wavelet(&row, solver).unwrap();
    let (unit, det) = unitary_defect(&w.u, 4 * (n_trunc + n).max(4));
    [unit, det, causality_defect(&row, &w.u)]
}

/// Largest unitary and determinant defects recorded by a JLE-1 run.
pub fn recursion_wavelet_defects(r: usize, n: usize, seed: u64) -> [f64; 2] {
    let s = random_spd(&MatrixFamilySpec::new(r, n, seed)).unwrap();
    let res = factorize(Algorithm::Jle1, &s, &AlgoParams::default()).unwrap();
    res.diagnostics
        .steps
        .iter()
        .fold([0.0f64; 2], |[u, d], st| [u.max(st.unitary_defect.unwrap_or(0.0)), d.max(st.det_defect.unwrap_or(0.0))])
}

pub fn random_generators(m: usize, n_trunc: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut d = Draw::new(seed);
    (0..m - 1).map(|_| (0..=n_trunc).map(|_| d.complex()).collect()).collect()
}

pub fn delta_min_eigenvalue(m: usize, n_trunc: usize, seed: u64) -> f64 {
    let lambdas = random_generators(m, n_trunc, seed);
    let (vals, _) = hermitian_eigh(&delta_matrix(&lambdas, n_trunc)).unwrap();
    vals.into_iter().fold(f64::INFINITY, f64::min)
}

/// `‖F − (F₊ + F₊*)‖` for `F = A + A*`, which is exactly Hermitian-symmetric.
pub fn plus_half_defect(r: usize, n: usize, seed: u64) -> f64 {
    let mut d = Draw::new(seed);
    let a = random_matrix(&mut d, r, r, -(n as i64), n as i64);
    let f = a.add(&a.adjoint());
    let h = plus_half_matrix(&f);
    f.sub(&h.add(&h.adjoint())).sup_norm()
}

/// Largest pairwise distance between the canonical factors of the four
/// algorithms on `A A* + shift · I`.
pub fn algorithm_agreement(r: usize, n: usize, seed: u64, shift: f64) -> f64 {
    let s = random_spd(&MatrixFamilySpec::new(r, n, seed).with_shift(shift)).unwrap();
    let factors: Vec<LaurentPolyMatrix> =
        Algorithm::ALL.iter().map(|&alg| factorize(alg, &s, &AlgoParams::default()).unwrap().splus).collect();
    let mut worst: f64 = 0.0;
    for i in 0..factors.len() {
        for j in i + 1..factors.len() {
            worst = worst.max(factors[i].sub(&factors[j]).sup_norm());
        }
    }
    worst
}

/// Relative gap between Cramer's-rule `ζ` and node-wise solves on a
/// diagonally dominant causal factor.
pub fn zeta_paths_gap(m: usize, n: usize, seed: u64) -> f64 {
    let mut d = Draw::new(seed);
    let k = m - 1;
    let mut sprev = random_matrix(&mut d, k, k, 0, n as i64);
    let boost = Complex64::new(2.0 * (k * (n + 1)) as f64, 0.0);
    for i in 0..k {
        sprev.coeff_mut(0)[(i, i)] += boost;
    }
    let col = random_matrix(&mut d, k, 1, -(n as i64), n as i64);
    let rational = zeta_cramer(&sprev, &col, DetMethod::Fft).unwrap();
    let nodes = 4 * (k * n + 2 * n + 1).next_power_of_two();
    let plan = DftPlan::new(nodes);
    let a = dft_eval_with(&plan, &sprev);
    let b: Vec<Vec<Complex64>> = dft_eval_with(&plan, &col).iter().map(|c| c.column(0)).collect();
    let (z, _) = zeta_at_nodes(&a, &b, 1e-12).unwrap();
    let mut gap: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (l, t) in unit_roots(nodes).into_iter().enumerate() {
        for j in 0..k {
            gap = gap.max((rational[j].eval(t).conj() - z[l][j]).norm());
            scale = scale.max(z[l][j].norm());
        }
    }
    gap / scale.max(1.0)
}

pub struct NormalizeCheck {
    pub hermitian_defect: f64,
    pub min_eigenvalue: f64,
    pub err_change: f64,
}

/// Normalizes a random causal `A` and compares `‖S − ÂÂ*‖` for `S = AA*`.
pub fn normalize_check(r: usize, n: usize, seed: u64) -> NormalizeCheck {
    let mut d = Draw::new(seed);
    let a = random_matrix(&mut d, r, r, 0, n as i64);
    let s = a.mul(&a.adjoint());
    let b = normalize_at_zero(&a).unwrap();
    let c0 = b.coeff_or_zero(0);
    let (vals, _) = hermitian_eigh(&c0).unwrap();
    NormalizeCheck {
        hermitian_defect: (&c0 - &c0.adjoint()).max_abs(),
        min_eigenvalue: vals[0],
        err_change: (harness::factorization_error(&s, &b) - harness::factorization_error(&s, &a)).abs(),
    }
}

/// Largest entrywise gap between the dense and displacement Δ solves.
pub fn displacement_gap(m: usize, n_trunc: usize, seed: u64) -> f64 {
    let lambdas = random_generators(m, n_trunc, seed);
    let a = solve_delta(&lambdas, n_trunc, DeltaSolver::Dense).unwrap();
    let b = solve_delta(&lambdas, n_trunc, DeltaSolver::Displacement).unwrap();
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
