//! Scalar spectral factorization: cepstral (exp-log) factor on a DFT grid,
//! Newton refinement, and causal expansion of rational functions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numcore::dft::{next_pow2, DftPlan};
use crate::numcore::LaurentPoly;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Samples below this fraction of the largest sample are raised to it.
pub const LOG_FLOOR: f64 = 1e-15;

/// Relative Hermitian-symmetry tolerance for scalar densities.
pub const DENSITY_TOL: f64 = 1e-10;

/// Grid values of a nonnegative density on `t_l = exp(2πil/K)`.
#[derive(Clone, Debug)]
pub struct DensitySamples {
    values: Vec<f64>,
    floor_applied: bool,
}

impl DensitySamples {
    /// Wraps raw samples, raising values below `LOG_FLOOR * max` when
    /// `allow_floor` is set and rejecting them otherwise.
    pub fn new(mut values: Vec<f64>, allow_floor: bool) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParams(format!("density grid needs at least 2 nodes, got {}", values.len())));
        }
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max <= 0.0 || !max.is_finite() {
            return Err(Error::NonPositiveSample { index: 0, value: max });
        }
        let floor = LOG_FLOOR * max;
        let mut floor_applied = false;
        for (index, v) in values.iter_mut().enumerate() {
            if *v <= floor || v.is_nan() {
                if !allow_floor || v.is_nan() {
                    return Err(Error::NonPositiveSample { index, value: *v });
                }
                *v = floor;
                floor_applied = true;
            }
        }
        Ok(DensitySamples { values, floor_applied })
    }

    /// Samples a Hermitian scalar density on `k` nodes (real parts only).
    pub fn from_density(density: &LaurentPoly, k: usize) -> Result<Self> {
        check_hermitian(density)?;
        let vals = DftPlan::new(k).eval_poly(density);
        Self::new(vals.iter().map(|z| z.re).collect(), true)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn floor_applied(&self) -> bool {
        self.floor_applied
    }
}

fn check_hermitian(d: &LaurentPoly) -> Result<()> {
    let defect = d.hermitian_defect();
    if defect > DENSITY_TOL * d.sup_norm().max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian { asymmetry: defect });
    }
    Ok(())
}

/// Rotates `f` so that its constant coefficient is real and positive.
pub fn normalize_phase(f: &LaurentPoly) -> LaurentPoly {
    let c0 = f.coeff(0);
    if c0.norm() == 0.0 {
        return f.clone();
    }
    f.scale(c0.conj() / c0.norm())
}

/// Causal factor of degree `m` from grid samples via the exponential of the
/// causal half of the log spectrum.
pub fn scalar_factor_explog(samples: &DensitySamples, m: usize) -> Result<LaurentPoly> {
    let k = samples.len();
    if m >= k {
        return Err(Error::InvalidParams(format!("output degree {m} needs more than {k} grid nodes")));
    }
    let plan = DftPlan::new(k);
    let logs: Vec<Complex64> = samples.values().iter().map(|v| Complex64::new(v.ln(), 0.0)).collect();
    let cep = plan.spectrum(&logs);
    let mut half = vec![ZERO; k];
    half[0] = cep[0] * 0.5;
    half[1..k.div_ceil(2)].copy_from_slice(&cep[1..k.div_ceil(2)]);
    let vals: Vec<Complex64> = plan.synthesize(&half).iter().map(|z| z.exp()).collect();
    let coeffs = plan.spectrum(&vals);
    Ok(normalize_phase(&LaurentPoly::new(0, coeffs[..=m].to_vec())))
}

/// `‖d − f f*‖` over the full product window.
pub fn scalar_residual(density: &LaurentPoly, f: &LaurentPoly) -> f64 {
    density.sub(&f.mul(&f.adjoint())).sup_norm()
}

/// Newton refinement of a causal factor: each step solves
/// `g f* + f g* = d + f f*` for the coefficients of `g` (degree of `f0`),
/// fixing the gauge by `Im g_0 = 0`. The best iterate is returned.
pub fn wilson_scalar_refine(density: &LaurentPoly, f0: &LaurentPoly, iters: usize) -> Result<LaurentPoly> {
    check_hermitian(density)?;
    if f0.lo() != 0 {
        return Err(Error::InvalidParams("initial factor must be causal".into()));
    }
    if f0.coeff(0).norm() == 0.0 {
        return Err(Error::InvalidParams("initial factor vanishes at the origin".into()));
    }
    let mdeg = f0.hi() as usize;
    let scale = density.sup_norm();
    let tiny = 4.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    // Growth below this level is rounding noise, not divergence.
    let noise = 1e3 * f64::EPSILON * (mdeg + 1) as f64 * scale;

    let mut f = normalize_phase(f0);
    let r0 = scalar_residual(density, &f);
    let mut best = (r0, f.clone());
    let mut prev = r0;
    let mut increases = 0;
    for it in 1..=iters {
        if best.0 <= tiny {
            break;
        }
        let g = match newton_step(density, &f, mdeg) {
            Some(g) => g,
            None => break,
        };
        let r = scalar_residual(density, &g);
        if !r.is_finite() {
            return Err(Error::Divergence { iteration: it, residual: r });
        }
        if r > prev && r > noise {
            increases += 1;
            if increases >= 3 && r > r0 {
                return Err(Error::Divergence { iteration: it, residual: r });
            }
        } else {
            increases = 0;
        }
        if r < best.0 {
            best = (r, g.clone());
        }
        let step = g.sub(&f).sup_norm();
        prev = r;
        f = g;
        if step <= 1e-15 * f.sup_norm() {
            break;
        }
    }
    Ok(normalize_phase(&best.1))
}

fn newton_step(density: &LaurentPoly, f: &LaurentPoly, mdeg: usize) -> Option<LaurentPoly> {
    let n = mdeg + 1;
    let fc = |j: i64| -> Complex64 {
        if j < 0 || j > mdeg as i64 {
            ZERO
        } else {
            f.coeff(j)
        }
    };
    let ff = f.mul(&f.adjoint());
    // Unknowns: u_0..u_M, v_0..v_M with g = u + iv.
    let dim = 2 * n;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    let mut row = 0;
    for p in 0..n as i64 {
        let target = density.coeff(p) + ff.coeff(p);
        let mut du = vec![ZERO; n];
        let mut dv = vec![ZERO; n];
        for j in 0..n as i64 {
            let a_c = fc(j - p).conj();
            let b_c = fc(j + p);
            du[j as usize] = a_c + b_c;
            dv[j as usize] = Complex64::new(0.0, 1.0) * (a_c - b_c);
        }
        for j in 0..n {
            a[(row, j)] = du[j].re;
            a[(row, n + j)] = dv[j].re;
        }
        rhs[row] = target.re;
        row += 1;
        if p > 0 {
            for j in 0..n {
                a[(row, j)] = du[j].im;
                a[(row, n + j)] = dv[j].im;
            }
            rhs[row] = target.im;
            row += 1;
        }
    }
    a[(row, n)] = 1.0;
    let x = a.lu().solve(&rhs)?;
    if x.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(LaurentPoly::new(0, (0..n).map(|j| Complex64::new(x[j], x[n + j])).collect()))
}

/// Samples `density` on at least `k` nodes, takes the cepstral factor of
/// degree `density.hi()`, then refines it `iters` times.
pub fn scalar_factor(density: &LaurentPoly, k: usize, iters: usize) -> Result<LaurentPoly> {
    check_hermitian(density)?;
    let m = density.hi().max(0) as usize;
    let k = k.max(next_pow2(4 * (m + 1)));
    let samples = DensitySamples::from_density(density, k)?;
    let f0 = scalar_factor_explog(&samples, m)?;
    if iters == 0 {
        return Ok(f0);
    }
    wilson_scalar_refine(density, &f0, iters)
}

/// `p / q` with `q` free of zeros in the closed unit disk.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalCausal {
    pub p: LaurentPoly,
    pub q: LaurentPoly,
}

impl RationalCausal {
    pub fn new(p: LaurentPoly, q: LaurentPoly) -> Result<Self> {
        if q.lo() != 0 {
            return Err(Error::InvalidParams("denominator must be causal".into()));
        }
        if q.coeff(0).norm() == 0.0 {
            return Err(Error::InvalidParams("denominator vanishes at the origin".into()));
        }
        Ok(RationalCausal { p, q })
    }

    pub fn polynomial(p: LaurentPoly) -> Self {
        RationalCausal { p, q: LaurentPoly::one() }
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.p.eval(t) / self.q.eval(t)
    }
}

/// Power-series coefficients `0..=len-1` of `1/q`.
pub fn reciprocal_series(q: &LaurentPoly, len: usize) -> Vec<Complex64> {
    assert_eq!(q.lo(), 0);
    let qc = q.coeffs();
    let inv0 = 1.0 / qc[0];
    let mut b = vec![ZERO; len];
    for k in 0..len {
        let mut s = if k == 0 { Complex64::new(1.0, 0.0) } else { ZERO };
        for j in 1..qc.len().min(k + 1) {
            s -= qc[j] * b[k - j];
        }
        b[k] = s * inv0;
    }
    b
}

/// Fourier coefficients `lo..=hi` of `p/q` on the unit circle.
pub fn causal_expand(f: &RationalCausal, lo: i64, hi: i64) -> Result<LaurentPoly> {
    assert!(lo <= hi);
    let k = next_pow2(4 * f.q.len().max(16));
    let qv = DftPlan::new(k).eval_poly(&f.q);
    let qmax = f.q.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let modulus = qv.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if modulus <= 1e-14 * qmax {
        return Err(Error::PoleOnCircle { modulus });
    }
    if hi < f.p.lo() {
        return Ok(LaurentPoly::zeros(lo, hi));
    }
    let inv = reciprocal_series(&f.q, (hi - f.p.lo() + 1) as usize);
    let pc = f.p.coeffs();
    let plo = f.p.lo();
    let coeffs = (lo..=hi)
        .map(|idx| {
            // c_idx = Σ_j p_j inv_{idx-j}, j ranging over p's window with idx-j ≥ 0
            let jmax = idx.min(f.p.hi());
            (plo..=jmax).map(|j| pc[(j - plo) as usize] * inv[(idx - j) as usize]).sum()
        })
        .collect();
    Ok(LaurentPoly::new(lo, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(p: &LaurentPoly, expect: &[f64], tol: f64) -> bool {
        expect.iter().enumerate().all(|(k, e)| (p.coeff(p.lo() + k as i64) - c(*e)).norm() <= tol)
    }

    #[test]
    fn constant_samples() {
        let s = DensitySamples::new(vec![4.0; 16], false).unwrap();
        let f = scalar_factor_explog(&s, 3).unwrap();
        assert!(close(&f, &[2.0, 0.0, 0.0, 0.0], 1e-14));
    }

    #[test]
    fn explog_recovers_two_plus_t() {
        let d = LaurentPoly::from_real(-1, &[2.0, 5.0, 2.0]);
        let s = DensitySamples::from_density(&d, 256).unwrap();
        let f = scalar_factor_explog(&s, 8).unwrap();
        assert!(close(&f, &[2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1e-13));
    }

    #[test]
    fn explog_on_boundary_zeros() {
        // -t^-2 + 2 - t^2 = (1 - t^2)(1 - t^-2), sampled with zeros at t = ±1
        let d = LaurentPoly::from_real(-2, &[-1.0, 0.0, 2.0, 0.0, -1.0]);
        let s = DensitySamples::from_density(&d, 512).unwrap();
        assert!(s.floor_applied());
        let f = scalar_factor_explog(&s, 2).unwrap();
        assert!(close(&f, &[1.0, 0.0, -1.0], 5e-2), "{f:?}");
    }

    #[test]
    fn flooring_can_be_disabled() {
        let err = DensitySamples::new(vec![1.0, 0.0, 1.0, 2.0], false).unwrap_err();
        assert!(matches!(err, Error::NonPositiveSample { index: 1, .. }));
    }

    #[test]
    fn degree_must_fit_grid() {
        let s = DensitySamples::new(vec![1.0; 4], false).unwrap();
        assert!(scalar_factor_explog(&s, 4).is_err());
    }

    #[test]
    fn refine_constant() {
        let d = LaurentPoly::constant(c(4.0));
        let f = wilson_scalar_refine(&d, &LaurentPoly::constant(c(1.9)), 10).unwrap();
        assert!((f.coeff(0) - c(2.0)).norm() < 1e-14);
    }

    #[test]
    fn refine_two_plus_t() {
        let d = LaurentPoly::from_real(-1, &[2.0, 5.0, 2.0]);
        let s = DensitySamples::from_density(&d, 16).unwrap();
        let f0 = scalar_factor_explog(&s, 1).unwrap();
        let f = wilson_scalar_refine(&d, &f0, 5).unwrap();
        assert!(scalar_residual(&d, &f) <= 1e-12);
        assert!(close(&f, &[2.0, 1.0], 1e-12));
    }

    #[test]
    fn refine_boundary_zeros() {
        let d = LaurentPoly::from_real(-2, &[-1.0, 0.0, 2.0, 0.0, -1.0]);
        let f = scalar_factor(&d, 512, 45).unwrap();
        assert!(scalar_residual(&d, &f) <= 1e-12, "{}", scalar_residual(&d, &f));
    }

    #[test]
    fn scalar_factor_examples() {
        let f = scalar_factor(&LaurentPoly::from_real(-1, &[2.0, 5.0, 2.0]), 512, 5).unwrap();
        assert!(close(&f, &[2.0, 1.0], 1e-12));
        let f = scalar_factor(&LaurentPoly::constant(c(9.0)), 512, 5).unwrap();
        assert!(close(&f, &[3.0], 1e-14));
    }

    #[test]
    fn non_hermitian_density_rejected() {
        let d = LaurentPoly::from_real(-1, &[1.0, 5.0, 2.0]);
        assert!(matches!(scalar_factor(&d, 64, 1), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn geometric_expansion() {
        let f = RationalCausal::new(LaurentPoly::one(), LaurentPoly::from_real(0, &[1.0, -0.5])).unwrap();
        let e = causal_expand(&f, 0, 3).unwrap();
        assert!(close(&e, &[1.0, 0.5, 0.25, 0.125], 1e-15));
    }

    #[test]
    fn p_equal_q_is_delta() {
        let q = LaurentPoly::from_real(0, &[2.0, 0.3, -0.1]);
        let e = causal_expand(&RationalCausal::new(q.clone(), q).unwrap(), -2, 4).unwrap();
        assert!(close(&e, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0], 1e-15));
    }

    #[test]
    fn reciprocal_of_two_plus_t() {
        let b = reciprocal_series(&LaurentPoly::from_real(0, &[2.0, 1.0]), 6);
        for (k, bk) in b.iter().enumerate() {
            assert!((bk - c(0.5 * (-0.5f64).powi(k as i32))).norm() < 1e-16);
        }
    }

    #[test]
    fn expansion_with_negative_numerator_indices() {
        // (t^-1 + 1)/(1 - t/2): oracle via direct geometric sums
        let f = RationalCausal::new(LaurentPoly::from_real(-1, &[1.0, 1.0]), LaurentPoly::from_real(0, &[1.0, -0.5]))
            .unwrap();
        let e = causal_expand(&f, -1, 3).unwrap();
        let expect: Vec<f64> = (-1..=3)
            .map(|k: i32| {
                let g = |j: i32| if j >= 0 { 0.5f64.powi(j) } else { 0.0 };
                g(k + 1) + g(k)
            })
            .collect();
        assert!(close(&e, &expect, 1e-15));
        let back = e.mul(&f.q).window(-1, 0);
        assert!(close(&back, &[1.0, 1.0], 1e-15));
    }

    #[test]
    fn pole_on_circle_is_rejected() {
        let f = RationalCausal::new(LaurentPoly::one(), LaurentPoly::from_real(0, &[1.0, -1.0])).unwrap();
        assert!(matches!(causal_expand(&f, 0, 4), Err(Error::PoleOnCircle { .. })));
    }
}
