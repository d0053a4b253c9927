//! C ABI for `specfact`.
//!
//! Objects cross the boundary as opaque handles created and freed by this
//! library. Every function returns an [`SfStatus`]; on failure the message is
//! available from [`sf_last_error_message`] on the same thread. Coefficients
//! are exchanged as interleaved `(re, im)` doubles ordered by index `k`, then
//! row, then column.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use specfact::harness::{self, MatrixFamilySpec};
use specfact::msf::{self, AlgoParams, Algorithm, DetMethod, FactorResult, FmPath, NSchedule};
use specfact::numcore::{ComplexMatrix, LaurentPolyMatrix};
use specfact::wavelet::DeltaSolver;
use specfact::{Complex64, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Schema = 4,
    Dimension = 5,
    NotHermitian = 6,
    UnknownFixture = 7,
    SingularDelta = 8,
    /// Any other numerical failure.
    Numerical = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfAlgorithm {
    Jle1 = 0,
    Jle2 = 1,
    Jle3 = 2,
    Wilson = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfSchedule {
    /// Per-algorithm default.
    Default = 0,
    /// `N = value · m · n`.
    Proportional = 1,
    /// `N = value · m`.
    PerStep = 2,
    /// `N = value`.
    Constant = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfDetMethod {
    Fft = 0,
    Direct = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfFmPath {
    Determinants = 0,
    Power = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfDeltaSolver {
    Dense = 0,
    Displacement = 1,
}

/// Tuning parameters; fill with [`sf_params_default`] before editing.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SfParams {
    pub schedule: SfSchedule,
    pub schedule_value: f64,
    pub kappa: u32,
    pub ratio: f64,
    pub scalar_iters: usize,
    pub wilson_iters: usize,
    pub scalar_grid: usize,
    pub det_method: SfDetMethod,
    pub fm_path: SfFmPath,
    pub delta_solver: SfDeltaSolver,
    pub node_rcond_min: f64,
    pub delta_rcond_min: f64,
}

/// Laurent-polynomial matrix.
pub struct SfPolyMatrix(LaurentPolyMatrix);

/// Output of [`sf_factorize`].
pub struct SfResult(FactorResult);

struct Failure {
    status: SfStatus,
    message: String,
}

impl Failure {
    fn new(status: SfStatus, message: impl Into<String>) -> Self {
        Failure { status, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.root() {
            Error::Io { .. } => SfStatus::Io,
            Error::Schema(_) => SfStatus::Schema,
            Error::Dimension(_) => SfStatus::Dimension,
            Error::NotHermitian { .. } => SfStatus::NotHermitian,
            Error::UnknownFixture(_) => SfStatus::UnknownFixture,
            Error::InvalidParams(_) => SfStatus::InvalidArgument,
            Error::SingularDelta { .. } => SfStatus::SingularDelta,
            _ => SfStatus::Numerical,
        };
        Failure::new(status, e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> SfStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|payload| {
        let message = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        Err(Failure::new(SfStatus::Panic, format!("panic: {message}")))
    });
    match outcome {
        Ok(()) => SfStatus::Ok,
        Err(failure) => {
            set_last_error(&failure.message);
            failure.status
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| Failure::new(SfStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| Failure::new(SfStatus::NullPointer, format!("{what} is null")))
}

unsafe fn path_arg<'a>(p: *const c_char) -> FfiResult<&'a Path> {
    if p.is_null() {
        return Err(Failure::new(SfStatus::NullPointer, "path is null"));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|_| Failure::new(SfStatus::InvalidArgument, "path is not UTF-8"))?;
    Ok(Path::new(s))
}

fn into_handle<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no NUL bytes").into_raw()
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a matrix from `2 · rows · cols · (hi − lo + 1)` interleaved doubles.
///
/// # Safety
/// `data` must point to that many readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_poly_matrix_new(
    rows: usize,
    cols: usize,
    lo: i64,
    hi: i64,
    data: *const f64,
    out: *mut *mut SfPolyMatrix,
) -> SfStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if rows == 0 || cols == 0 || hi < lo {
            return Err(Failure::new(
                SfStatus::InvalidArgument,
                format!("invalid shape {rows}x{cols} on [{lo}, {hi}]"),
            ));
        }
        if data.is_null() {
            return Err(Failure::new(SfStatus::NullPointer, "data is null"));
        }
        let len = (hi - lo + 1) as usize;
        let per = rows * cols;
        let values = std::slice::from_raw_parts(data, 2 * per * len);
        let mats = values
            .chunks_exact(2 * per)
            .map(|chunk| {
                let entries = chunk.chunks_exact(2).map(|z| Complex64::new(z[0], z[1])).collect();
                ComplexMatrix::from_vec(rows, cols, entries)
            })
            .collect::<Result<Vec<_>, _>>()?;
        *out = into_handle(SfPolyMatrix(LaurentPolyMatrix::new(lo, mats)?));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sf_poly_matrix_free(m: *mut SfPolyMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Writes the shape; any output pointer may be null.
///
/// # Safety
/// `m` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_poly_matrix_shape(
    m: *const SfPolyMatrix,
    rows: *mut usize,
    cols: *mut usize,
    lo: *mut i64,
    hi: *mut i64,
) -> SfStatus {
    guard(|| {
        let m = &deref(m, "matrix")?.0;
        if let Some(r) = rows.as_mut() {
            *r = m.rows();
        }
        if let Some(c) = cols.as_mut() {
            *c = m.cols();
        }
        if let Some(l) = lo.as_mut() {
            *l = m.lo();
        }
        if let Some(h) = hi.as_mut() {
            *h = m.hi();
        }
        Ok(())
    })
}

/// Copies the interleaved coefficients into `out`, which holds `len` doubles.
///
/// # Safety
/// `m` must be a live handle; `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sf_poly_matrix_coeffs(m: *const SfPolyMatrix, out: *mut f64, len: usize) -> SfStatus {
    guard(|| {
        let m = &deref(m, "matrix")?.0;
        let need = 2 * m.rows() * m.cols() * m.window_len();
        if len < need {
            return Err(Failure::new(SfStatus::InvalidArgument, format!("buffer holds {len} doubles, need {need}")));
        }
        if out.is_null() {
            return Err(Failure::new(SfStatus::NullPointer, "out is null"));
        }
        let buf = std::slice::from_raw_parts_mut(out, need);
        let mut pos = 0;
        for c in m.coeff_matrices() {
            for i in 0..c.rows() {
                for j in 0..c.cols() {
                    buf[pos] = c[(i, j)].re;
                    buf[pos + 1] = c[(i, j)].im;
                    pos += 2;
                }
            }
        }
        Ok(())
    })
}

/// Loads a coefficient file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_poly_matrix_load(path: *const c_char, out: *mut *mut SfPolyMatrix) -> SfStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = into_handle(SfPolyMatrix(specfact::io::load(path_arg(path)?)?));
        Ok(())
    })
}

/// # Safety
/// `m` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sf_poly_matrix_save(m: *const SfPolyMatrix, path: *const c_char) -> SfStatus {
    guard(|| {
        let m = &deref(m, "matrix")?.0;
        specfact::io::save(path_arg(path)?, m)?;
        Ok(())
    })
}

/// Serializes to the coefficient-file JSON; free with [`sf_string_free`].
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_poly_matrix_to_json(m: *const SfPolyMatrix, out: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let m = &deref(m, "matrix")?.0;
        *out_ptr(out, "out")? = into_c_string(specfact::io::to_json(m));
        Ok(())
    })
}

/// Built-in fixture. `factor` may be null; it receives null when the fixture
/// has no known factor.
///
/// # Safety
/// `name` must be NUL-terminated; `density` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_fixture(
    name: *const c_char,
    density: *mut *mut SfPolyMatrix,
    factor: *mut *mut SfPolyMatrix,
) -> SfStatus {
    guard(|| {
        let density = out_ptr(density, "density")?;
        if name.is_null() {
            return Err(Failure::new(SfStatus::NullPointer, "name is null"));
        }
        let name = CStr::from_ptr(name).to_string_lossy();
        let f = harness::fixture(&name)?;
        *density = into_handle(SfPolyMatrix(f.density));
        if let Some(slot) = factor.as_mut() {
            *slot = f.known_factor.map_or(ptr::null_mut(), |k| into_handle(SfPolyMatrix(k)));
        }
        Ok(())
    })
}

/// Random density `A A* + shift · I` with `A` of size `r` and degree `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_random_spd(
    r: usize,
    n: usize,
    seed: u64,
    shift: f64,
    out: *mut *mut SfPolyMatrix,
) -> SfStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let s = harness::random_spd(&MatrixFamilySpec::new(r, n, seed).with_shift(shift))?;
        *out = into_handle(SfPolyMatrix(s));
        Ok(())
    })
}

/// `‖S − F F*‖` in the coefficient sup-norm.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_factorization_error(
    density: *const SfPolyMatrix,
    factor: *const SfPolyMatrix,
    out: *mut f64,
) -> SfStatus {
    guard(|| {
        let s = &deref(density, "density")?.0;
        let f = &deref(factor, "factor")?.0;
        if s.rows() != f.rows() || f.rows() != f.cols() {
            return Err(Failure::new(
                SfStatus::Dimension,
                format!("factor {}x{} does not match density {}x{}", f.rows(), f.cols(), s.rows(), s.cols()),
            ));
        }
        *out_ptr(out, "out")? = harness::factorization_error(s, f);
        Ok(())
    })
}

impl From<AlgoParams> for SfParams {
    fn from(p: AlgoParams) -> Self {
        let (schedule, schedule_value) = match p.n_schedule {
            None | Some(NSchedule::Table { .. }) => (SfSchedule::Default, 0.0),
            Some(NSchedule::Proportional { factor }) => (SfSchedule::Proportional, factor),
            Some(NSchedule::PerStep { factor }) => (SfSchedule::PerStep, factor),
            Some(NSchedule::Constant { n }) => (SfSchedule::Constant, n as f64),
        };
        SfParams {
            schedule,
            schedule_value,
            kappa: p.kappa,
            ratio: p.ratio,
            scalar_iters: p.scalar_iters,
            wilson_iters: p.wilson_iters,
            scalar_grid: p.scalar_grid,
            det_method: match p.det_method {
                DetMethod::Fft => SfDetMethod::Fft,
                DetMethod::Direct => SfDetMethod::Direct,
            },
            fm_path: match p.fm_path {
                FmPath::Determinants => SfFmPath::Determinants,
                FmPath::Power => SfFmPath::Power,
            },
            delta_solver: match p.delta_solver {
                DeltaSolver::Dense => SfDeltaSolver::Dense,
                DeltaSolver::Displacement => SfDeltaSolver::Displacement,
            },
            node_rcond_min: p.node_rcond_min,
            delta_rcond_min: p.delta_rcond_min,
        }
    }
}

impl SfParams {
    fn to_params(self) -> FfiResult<AlgoParams> {
        let v = self.schedule_value;
        let n_schedule = match self.schedule {
            SfSchedule::Default => None,
            SfSchedule::Proportional => Some(NSchedule::Proportional { factor: v }),
            SfSchedule::PerStep => Some(NSchedule::PerStep { factor: v }),
            SfSchedule::Constant if v >= 1.0 && v.fract() == 0.0 => Some(NSchedule::Constant { n: v as usize }),
            SfSchedule::Constant => {
                return Err(Failure::new(
                    SfStatus::InvalidArgument,
                    format!("constant N must be a positive integer, got {v}"),
                ))
            }
        };
        let p = AlgoParams {
            n_schedule,
            kappa: self.kappa,
            ratio: self.ratio,
            scalar_iters: self.scalar_iters,
            wilson_iters: self.wilson_iters,
            scalar_grid: self.scalar_grid,
            det_method: match self.det_method {
                SfDetMethod::Fft => DetMethod::Fft,
                SfDetMethod::Direct => DetMethod::Direct,
            },
            fm_path: match self.fm_path {
                SfFmPath::Determinants => FmPath::Determinants,
                SfFmPath::Power => FmPath::Power,
            },
            delta_solver: match self.delta_solver {
                SfDeltaSolver::Dense => DeltaSolver::Dense,
                SfDeltaSolver::Displacement => DeltaSolver::Displacement,
            },
            node_rcond_min: self.node_rcond_min,
            delta_rcond_min: self.delta_rcond_min,
        };
        p.validate()?;
        Ok(p)
    }
}

/// Writes the library defaults into `out`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_params_default(out: *mut SfParams) -> SfStatus {
    guard(|| {
        *out_ptr(out, "out")? = AlgoParams::default().into();
        Ok(())
    })
}

/// Factorizes `density`. `params` may be null for the defaults.
///
/// # Safety
/// `density` must be a live handle, `params` null or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_factorize(
    alg: SfAlgorithm,
    density: *const SfPolyMatrix,
    params: *const SfParams,
    out: *mut *mut SfResult,
) -> SfStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let s = &deref(density, "density")?.0;
        let params = match params.as_ref() {
            Some(p) => p.to_params()?,
            None => AlgoParams::default(),
        };
        let alg = match alg {
            SfAlgorithm::Jle1 => Algorithm::Jle1,
            SfAlgorithm::Jle2 => Algorithm::Jle2,
            SfAlgorithm::Jle3 => Algorithm::Jle3,
            SfAlgorithm::Wilson => Algorithm::Wilson,
        };
        *out = into_handle(SfResult(msf::factorize(alg, s, &params)?));
        Ok(())
    })
}

/// # Safety
/// `res` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn sf_result_free(res: *mut SfResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// Residual `‖S − S⁺ (S⁺)*‖` recorded with the result.
///
/// # Safety
/// `res` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_result_error(res: *const SfResult, out: *mut f64) -> SfStatus {
    guard(|| {
        *out_ptr(out, "out")? = deref(res, "result")?.0.err;
        Ok(())
    })
}

/// Copy of the factor as a new matrix handle.
///
/// # Safety
/// `res` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_result_factor(res: *const SfResult, out: *mut *mut SfPolyMatrix) -> SfStatus {
    guard(|| {
        let splus = deref(res, "result")?.0.splus.clone();
        *out_ptr(out, "out")? = into_handle(SfPolyMatrix(splus));
        Ok(())
    })
}

/// Run diagnostics as JSON; free with [`sf_string_free`].
///
/// # Safety
/// `res` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_result_diagnostics_json(res: *const SfResult, out: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let d = &deref(res, "result")?.0.diagnostics;
        let json = serde_json::to_string(d).map_err(|e| Failure::new(SfStatus::Schema, e.to_string()))?;
        *out_ptr(out, "out")? = into_c_string(json);
        Ok(())
    })
}
