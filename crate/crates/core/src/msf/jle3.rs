use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;

use super::jle1::leading_determinants;
use super::params::AlgoParams;
use super::{finish, prepare_density, Diagnostics, FactorResult};
use crate::error::{Error, Result};
use crate::numcore::linalg::{cholesky_factor, lu_factor, toeplitz_lower};
use crate::numcore::polydet::envelope_warning;
use crate::numcore::{
    cofactor_transpose, cofactor_transpose_direct, next_pow2, ComplexMatrix, DftPlan, LaurentPoly, LaurentPolyMatrix,
};
use crate::scalarfact::scalar_factor;

const NAME: &str = "jle3";

/// `det S` at or below this fraction of its peak on the circle counts as a
/// boundary zero.
pub const DET_BOUNDARY_TOL: f64 = 1e-10;

/// Coefficients `lo..=hi` of `p` as a dense vector.
fn coeff_vec(p: &LaurentPoly, lo: i64, hi: i64) -> Vec<Complex64> {
    (lo..=hi).map(|k| p.coeff(k)).collect()
}

/// JLE-3: one square linear system whose solution holds every entry of the
/// factor, normalized at `t = 1` by a Cholesky factor of `S(1)`.
pub fn jle3(s: &LaurentPolyMatrix, params: &AlgoParams) -> Result<FactorResult> {
    let start = Instant::now();
    params.validate()?;
    let (s, n) = prepare_density(s)?;
    let r = s.rows();
    let mut diag = Diagnostics { algorithm: NAME.into(), params: params.clone(), ..Default::default() };
    diag.warnings.extend(envelope_warning(r, n));
    let at = |step| move |e: Error| e.at_step(NAME, r, step);

    let dets = leading_determinants(&s, params.det_method);
    let det_s = &dets[r - 1];
    let floor = relative_circle_minimum(det_s);
    if floor <= DET_BOUNDARY_TOL {
        return Err(Error::SingularDelta {
            reason: format!("det S falls to {floor:.1e} of its peak on the unit circle"),
        }
        .at_step(NAME, r, "determinant check"));
    }
    let a = scalar_factor(det_s, params.scalar_grid, params.scalar_iters).map_err(at("scalar factor of det S"))?;
    if r == 1 {
        let raw = LaurentPolyMatrix::from_entries(1, 1, &[a])?;
        return finish(&s, &raw, n, diag, start);
    }

    let (ri, ni) = (r as i64, n as i64);
    let sr1 = s.leading(r - 1);
    let det_r1 = if r >= 2 { dets[r - 2].clone() } else { LaurentPoly::one() };
    let cof = match params.det_method {
        super::DetMethod::Fft => cofactor_transpose(&sr1, &det_r1).map_err(at("cofactors of S_[r-1]"))?,
        super::DetMethod::Direct => cofactor_transpose_direct(&sr1),
    };
    let shift = (ri - 1) * ni;
    let crow = s.block(r - 1, 0, 1, r - 1).mul(&cof);
    let c: Vec<Vec<Complex64>> = (0..r - 1).map(|j| coeff_vec(&crow.entry(0, j), -shift, shift)).collect();
    let b = coeff_vec(&det_r1, -shift, shift);
    let a = coeff_vec(&a, 0, ri * ni);

    let order = 2 * r * n - n + r + 1;
    let top = 2 * r * n - n + 1;
    let blk = n + 1;
    let mut delta = ComplexMatrix::zeros(order, order);
    let mut place = |m: &ComplexMatrix, col0: usize, sign: f64| {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                delta[(i, col0 + j)] = m[(i, j)] * sign;
            }
        }
    };
    for (j, cj) in c.iter().enumerate() {
        place(&toeplitz_lower(cj, n), j * blk, 1.0);
    }
    place(&toeplitz_lower(&b, n), (r - 1) * blk, -1.0);
    place(&toeplitz_lower(&a, (r - 1) * n), r * blk, 1.0);
    for i in 0..r {
        for k in 0..blk {
            delta[(top + i, i * blk + k)] = Complex64::new(1.0, 0.0);
        }
    }

    let s1 = s.eval(Complex64::new(1.0, 0.0));
    let s1 = ComplexMatrix::from_fn(r, r, |i, j| 0.5 * (s1[(i, j)] + s1[(j, i)].conj()));
    let h = cholesky_factor(&s1).map_err(at("Cholesky factor of S(1)"))?;

    let (row_scale, col_scale) = equilibrate(&mut delta);
    let lu = lu_factor(&delta).map_err(|e| {
        Error::SingularDelta { reason: e.to_string() }.at_step(NAME, r, "solve of the coefficient system")
    })?;
    let rcond = lu.rcond();
    diag.rcond_delta = Some(rcond);
    if rcond < params.delta_rcond_min {
        return Err(Error::IllConditionedDelta { rcond }.at_step(NAME, r, "solve of the coefficient system"));
    }

    let mut raw = LaurentPolyMatrix::zeros(r, r, 0, ni);
    for j in 0..r {
        let mut rhs = vec![Complex64::new(0.0, 0.0); order];
        for i in 0..r {
            rhs[top + i] = h[(i, j)] * row_scale[top + i];
        }
        let mut x = lu.solve_vec(&rhs);
        for (xi, ci) in x.iter_mut().zip(&col_scale) {
            *xi *= ci;
        }
        for i in 0..r {
            for k in 0..blk {
                raw.coeff_mut(k as i64)[(i, j)] = x[i * blk + k];
            }
        }
    }
    finish(&s, &raw, n, diag, start)
}

/// Scales rows, then columns, of `m` to unit largest modulus in place;
/// returns the two scale vectors.
fn equilibrate(m: &mut ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    let (rows, cols) = (m.rows(), m.cols());
    let inv = |x: f64| if x > 0.0 { 1.0 / x } else { 1.0 };
    let row_scale: Vec<f64> = (0..rows).map(|i| inv(m.row(i).iter().map(|z| z.norm()).fold(0.0, f64::max))).collect();
    for (i, &s) in row_scale.iter().enumerate() {
        m.row_mut(i).iter_mut().for_each(|z| *z *= s);
    }
    let col_scale: Vec<f64> = (0..cols).map(|j| inv((0..rows).map(|i| m[(i, j)].norm()).fold(0.0, f64::max))).collect();
    for i in 0..rows {
        for (z, &s) in m.row_mut(i).iter_mut().zip(&col_scale) {
            *z *= s;
        }
    }
    (row_scale, col_scale)
}

/// Minimum of the real trigonometric polynomial `p` over the unit circle,
/// relative to its largest modulus on a sampling grid. Local minima of the
/// samples are polished by golden-section search.
pub(crate) fn relative_circle_minimum(p: &LaurentPoly) -> f64 {
    let deg = p.lo().unsigned_abs().max(p.hi().unsigned_abs()) as usize;
    let k = next_pow2((16 * deg).max(64));
    let vals: Vec<f64> = DftPlan::new(k).eval_poly(p).iter().map(|z| z.re).collect();
    let peak = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return 0.0;
    }
    let at = |theta: f64| p.eval(Complex64::from_polar(1.0, theta)).re;
    let h = TAU / k as f64;
    let mut minima: Vec<usize> =
        (0..k).filter(|&l| vals[l] <= vals[(l + k - 1) % k] && vals[l] <= vals[(l + 1) % k]).collect();
    minima.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    minima.truncate(8);
    let polished = minima
        .iter()
        .map(|&l| golden_min(at, (l as f64 - 1.0) * h, (l as f64 + 1.0) * h))
        .fold(f64::INFINITY, f64::min);
    let sampled = vals.iter().copied().fold(f64::INFINITY, f64::min);
    polished.min(sampled) / peak
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            (b, d, fd) = (d, c, fc);
            c = b - g * (b - a);
            fc = f(c);
        } else {
            (a, c, fc) = (c, d, fd);
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{fixture, random_spd, MatrixFamilySpec};
    use crate::scalarfact::scalar_factor;

    #[test]
    fn circle_minimum_of_known_polynomials() {
        // 2 + cos θ has minimum 1 and peak 3.
        let p = LaurentPoly::from_real(-1, &[0.5, 2.0, 0.5]);
        assert!((relative_circle_minimum(&p) - 1.0 / 3.0).abs() < 1e-12);
        // 2 − 2 cos θ vanishes at θ = 0.
        let q = LaurentPoly::from_real(-1, &[-1.0, 2.0, -1.0]);
        assert!(relative_circle_minimum(&q).abs() < 1e-15);
        assert_eq!(relative_circle_minimum(&LaurentPoly::zeros(0, 0)), 0.0);
    }

    #[test]
    fn zero_between_grid_nodes_is_found() {
        // 1 − cos(θ − φ) with φ off every grid node.
        let phi: f64 = 0.123_456_7;
        let e = Complex64::from_polar(0.5, phi);
        let p = LaurentPoly::new(-1, vec![-e, Complex64::new(1.0, 0.0), -e.conj()]);
        assert!(relative_circle_minimum(&p) < 1e-12);
    }

    #[test]
    fn equilibration_balances_rows_and_columns() {
        let mut m = ComplexMatrix::from_real_rows(&[&[1e6, 2e6], &[3e-3, 1e-3]]);
        let (rs, cs) = equilibrate(&mut m);
        assert_eq!(rs.len(), 2);
        assert_eq!(cs.len(), 2);
        for i in 0..2 {
            let row_max = m.row(i).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!((0.5..=2.0).contains(&row_max), "row {i}: {row_max}");
        }
    }

    #[test]
    fn scalar_input_matches_scalar_factor() {
        let s = LaurentPolyMatrix::from_entries(1, 1, &[LaurentPoly::from_real(-1, &[2.0, 5.0, 2.0])]).unwrap();
        let res = jle3(&s, &AlgoParams::default()).unwrap();
        let direct = scalar_factor(&s.entry(0, 0), 2048, 5).unwrap();
        assert!(res.splus.entry(0, 0).sub(&direct).sup_norm() < 1e-12);
        assert!(res.err < 1e-12);
    }

    #[test]
    fn singular_fixtures_are_rejected() {
        for name in ["ieee0", "sa4"] {
            let err = jle3(&fixture(name).unwrap().density, &AlgoParams::default()).unwrap_err();
            assert!(matches!(err.root(), Error::SingularDelta { .. }), "{name}: {err}");
            assert!(err.to_string().contains("m=2"), "{err}");
        }
    }

    #[test]
    fn random_four_by_thirty() {
        let s = random_spd(&MatrixFamilySpec::new(4, 30, 0)).unwrap();
        let res = jle3(&s, &AlgoParams::default()).unwrap();
        assert!(res.err <= 1e-6, "{}", res.err);
        assert!(res.diagnostics.rcond_delta.is_some());
    }
}
