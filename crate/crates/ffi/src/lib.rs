//! C interface to the steady-state solvers.
//!
//! Objects cross the boundary as opaque pointers that the caller releases
//! with the matching `*_free` function. Every fallible call returns a
//! [`SteadyStatus`]; on failure the message is available from
//! [`steady_last_error`] on the same thread until the next failing call.
//! Panics are caught and reported as `STEADY_STATUS_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use steady_core::sparse::mtx;
use steady_core::steady::{solve, Method, Ordering, SolverOptions, SteadyStateResult};
use steady_core::{band_profile, Error, LiouvillianSystem, ModelSpec, SparseComplexMatrix, System};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteadyStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Singular = 5,
    Breakdown = 6,
    MemoryLimit = 7,
    NotUnique = 8,
    NotConverged = 9,
    DimensionTooLarge = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteadyOrdering {
    Natural = 0,
    Rcm = 1,
    Cmd = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteadyMethod {
    Direct = 0,
    Gmres = 1,
    Bicgstab = 2,
    Power = 3,
    PowerGmres = 4,
    PowerBicgstab = 5,
}

/// Solver settings. Start from [`steady_options_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SteadyOptions {
    pub ordering: SteadyOrdering,
    pub tol: f64,
    pub drop_tol: f64,
    pub fill: f64,
    pub restart: usize,
    pub max_iter: usize,
    pub sigma: f64,
    /// Trace weight; NaN selects the default derived from the diagonal.
    pub weight: f64,
    pub seed: u64,
    pub max_outer: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SteadyBandProfile {
    pub upper_bandwidth: usize,
    pub lower_bandwidth: usize,
    pub bandwidth: usize,
    pub upper_profile: usize,
    pub lower_profile: usize,
    pub profile: usize,
}

/// Scalar diagnostics of a solve. `condest` is NaN when no preconditioner
/// was built.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct SteadyDiagnostics {
    pub residual: f64,
    pub iterations: usize,
    pub outer_iterations: usize,
    pub converged: bool,
    pub breakdown: bool,
    pub fill_factor: f64,
    pub factor_nnz: usize,
    pub condest: f64,
    pub band_before: SteadyBandProfile,
    pub band_after: SteadyBandProfile,
    pub build_time: f64,
    pub factor_time: f64,
    pub solve_time: f64,
}

/// Sparse complex matrix.
pub struct SteadyMatrix(SparseComplexMatrix);

/// Plain Liouvillian of a model.
pub struct SteadyLiouvillian(LiouvillianSystem);

/// Steady state and diagnostics.
pub struct SteadyResult(SteadyStateResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SteadyStatus {
    match e {
        Error::Io(_) => SteadyStatus::Io,
        Error::Parse { .. } | Error::Csv(_) | Error::Json(_) => SteadyStatus::Parse,
        Error::Singular { .. } | Error::StructurallySingular { .. } => SteadyStatus::Singular,
        Error::PreconditionerBreakdown { .. } | Error::InnerSolverFailure(_) => SteadyStatus::Breakdown,
        Error::MemoryLimit { .. } => SteadyStatus::MemoryLimit,
        Error::DegenerateNullSpace { .. } => SteadyStatus::NotUnique,
        Error::OuterIterationLimit { .. } => SteadyStatus::NotConverged,
        Error::DimensionTooLarge { .. } | Error::DimensionOverflow(_) => SteadyStatus::DimensionTooLarge,
        Error::ShapeMismatch { .. }
        | Error::LengthMismatch { .. }
        | Error::NonSquare { .. }
        | Error::EmptyMatrix
        | Error::InvalidStructure(_)
        | Error::InvalidArgument(_)
        | Error::NonHermitian { .. }
        | Error::InvalidSweep(_) => SteadyStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (SteadyStatus, String)>) -> SteadyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SteadyStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            SteadyStatus::Panic
        }
    }
}

fn core<T>(r: steady_core::Result<T>) -> Result<T, (SteadyStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (SteadyStatus, String) {
    (SteadyStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SteadyStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (SteadyStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (SteadyStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

fn band(b: &steady_core::BandProfile) -> SteadyBandProfile {
    SteadyBandProfile {
        upper_bandwidth: b.ub,
        lower_bandwidth: b.lb,
        bandwidth: b.bandwidth,
        upper_profile: b.up,
        lower_profile: b.lp,
        profile: b.profile,
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn steady_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn steady_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Reads a Matrix Market coordinate file.
#[no_mangle]
pub unsafe extern "C" fn steady_matrix_read_mtx(path: *const c_char, out: *mut *mut SteadyMatrix) -> SteadyStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let m = core(mtx::read_path(str_arg(path, "path")?))?;
        *out = boxed(SteadyMatrix(m));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn steady_matrix_write_mtx(m: *const SteadyMatrix, path: *const c_char) -> SteadyStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("matrix"))?;
        core(mtx::write_path(&m.0, str_arg(path, "path")?))
    })
}

/// Builds a matrix from coordinate triplets; duplicates are summed.
#[no_mangle]
pub unsafe extern "C" fn steady_matrix_from_triplets(
    nrows: usize,
    ncols: usize,
    rows: *const usize,
    cols: *const usize,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut SteadyMatrix,
) -> SteadyStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        if len > 0 && (rows.is_null() || cols.is_null() || re.is_null() || im.is_null()) {
            return Err(null("triplet array"));
        }
        let t: Vec<_> =
            (0..len).map(|k| (*rows.add(k), *cols.add(k), Complex64::new(*re.add(k), *im.add(k)))).collect();
        let m = core(SparseComplexMatrix::from_triplets(nrows, ncols, &t))?;
        *out = boxed(SteadyMatrix(m));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn steady_matrix_free(m: *mut SteadyMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of rows; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn steady_matrix_nrows(m: *const SteadyMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.nrows())
}

/// Number of columns; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn steady_matrix_ncols(m: *const SteadyMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.ncols())
}

/// Stored entries; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn steady_matrix_nnz(m: *const SteadyMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.nnz())
}

#[no_mangle]
pub unsafe extern "C" fn steady_matrix_band_profile(
    m: *const SteadyMatrix,
    out: *mut SteadyBandProfile,
) -> SteadyStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("matrix"))?;
        let out = out_arg(out, "out")?;
        *out = band(&core(band_profile(&m.0))?);
        Ok(())
    })
}

/// Builds the plain Liouvillian of a model system (`"jc"`, `"spin"` or
/// `"optomech"`). `names`/`values` hold `n_params` parameter overrides and
/// may be null when `n_params` is 0.
#[no_mangle]
pub unsafe extern "C" fn steady_liouvillian_build(
    system: *const c_char,
    size: usize,
    names: *const *const c_char,
    values: *const f64,
    n_params: usize,
    out: *mut *mut SteadyLiouvillian,
) -> SteadyStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let system: System = core(str_arg(system, "system")?.parse())?;
        let mut spec = ModelSpec::new(system, size);
        if n_params > 0 && (names.is_null() || values.is_null()) {
            return Err(null("parameter array"));
        }
        for k in 0..n_params {
            spec = spec.with(str_arg(*names.add(k), "parameter name")?, *values.add(k));
        }
        let l = core(spec.build().and_then(|m| m.liouvillian()))?;
        *out = boxed(SteadyLiouvillian(l));
        Ok(())
    })
}

/// Wraps a square matrix as a plain Liouvillian on a Hilbert space of
/// dimension `hilbert_dim` (the matrix must be `hilbert_dim²` square).
#[no_mangle]
pub unsafe extern "C" fn steady_liouvillian_from_matrix(
    m: *const SteadyMatrix,
    hilbert_dim: usize,
    out: *mut *mut SteadyLiouvillian,
) -> SteadyStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let m = m.as_ref().ok_or_else(|| null("matrix"))?;
        let l = core(LiouvillianSystem::from_matrix(m.0.clone(), hilbert_dim))?;
        *out = boxed(SteadyLiouvillian(l));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn steady_liouvillian_free(l: *mut SteadyLiouvillian) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// Hilbert-space dimension; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn steady_liouvillian_hilbert_dim(l: *const SteadyLiouvillian) -> usize {
    l.as_ref().map_or(0, |l| l.0.hilbert_dim())
}

/// Copies the superoperator matrix into a new matrix handle.
#[no_mangle]
pub unsafe extern "C" fn steady_liouvillian_matrix(
    l: *const SteadyLiouvillian,
    out: *mut *mut SteadyMatrix,
) -> SteadyStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let l = l.as_ref().ok_or_else(|| null("liouvillian"))?;
        *out = boxed(SteadyMatrix(l.0.matrix().clone()));
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn steady_options_default() -> SteadyOptions {
    let d = SolverOptions::default();
    SteadyOptions {
        ordering: SteadyOrdering::Rcm,
        tol: d.tol,
        drop_tol: d.drop_tol,
        fill: d.fill,
        restart: d.restart,
        max_iter: d.max_iter,
        sigma: d.sigma,
        weight: f64::NAN,
        seed: d.seed,
        max_outer: d.max_outer,
    }
}

fn options(o: &SteadyOptions) -> SolverOptions {
    SolverOptions {
        ordering: match o.ordering {
            SteadyOrdering::Natural => Ordering::Natural,
            SteadyOrdering::Rcm => Ordering::Rcm,
            SteadyOrdering::Cmd => Ordering::Cmd,
        },
        tol: o.tol,
        drop_tol: o.drop_tol,
        fill: o.fill,
        restart: o.restart,
        max_iter: o.max_iter,
        sigma: o.sigma,
        weight: (!o.weight.is_nan()).then_some(o.weight),
        seed: o.seed,
        max_outer: o.max_outer,
        ..SolverOptions::default()
    }
}

/// Computes the steady state. `opts` may be null for the defaults. A
/// Krylov solve that stops without converging still returns `STEADY_STATUS_OK`;
/// check `converged` in the diagnostics.
#[no_mangle]
pub unsafe extern "C" fn steady_solve(
    l: *const SteadyLiouvillian,
    method: SteadyMethod,
    opts: *const SteadyOptions,
    out: *mut *mut SteadyResult,
) -> SteadyStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let l = l.as_ref().ok_or_else(|| null("liouvillian"))?;
        let o = opts.as_ref().copied().unwrap_or_else(|| steady_options_default());
        let method = match method {
            SteadyMethod::Direct => Method::Direct,
            SteadyMethod::Gmres => Method::Gmres,
            SteadyMethod::Bicgstab => Method::Bicgstab,
            SteadyMethod::Power => Method::Power,
            SteadyMethod::PowerGmres => Method::PowerGmres,
            SteadyMethod::PowerBicgstab => Method::PowerBicgstab,
        };
        let r = core(solve(&l.0, method, &options(&o)))?;
        *out = boxed(SteadyResult(r));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn steady_result_free(r: *mut SteadyResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Side of the density matrix; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn steady_result_dim(r: *const SteadyResult) -> usize {
    r.as_ref().map_or(0, |r| r.0.rho.nrows())
}

/// Copies the density matrix in column-major order into `re` and `im`,
/// each of length `len = dim²`.
#[no_mangle]
pub unsafe extern "C" fn steady_result_rho(
    r: *const SteadyResult,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> SteadyStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("result"))?;
        if re.is_null() || im.is_null() {
            return Err(null("output buffer"));
        }
        let rho = &r.0.rho;
        if len != rho.len() {
            return Err((SteadyStatus::InvalidArgument, format!("buffer length {len}, need {}", rho.len())));
        }
        for (k, z) in rho.iter().enumerate() {
            *re.add(k) = z.re;
            *im.add(k) = z.im;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn steady_result_diagnostics(
    r: *const SteadyResult,
    out: *mut SteadyDiagnostics,
) -> SteadyStatus {
    guard(|| {
        let r = &r.as_ref().ok_or_else(|| null("result"))?.0;
        let out = out_arg(out, "out")?;
        *out = SteadyDiagnostics {
            residual: r.residual,
            iterations: r.iterations,
            outer_iterations: r.outer_iterations,
            converged: r.converged,
            breakdown: r.breakdown,
            fill_factor: r.fill_factor,
            factor_nnz: r.factor_nnz,
            condest: r.condest.unwrap_or(f64::NAN),
            band_before: band(&r.band_before),
            band_after: band(&r.band_after),
            build_time: r.build_time,
            factor_time: r.factor_time,
            solve_time: r.solve_time,
        };
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_a_status_code() {
        let st = guard(|| panic!("boom"));
        assert_eq!(st, SteadyStatus::Panic);
        let msg = unsafe { CStr::from_ptr(steady_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "internal error: boom");
    }

    #[test]
    fn core_errors_map_to_codes() {
        assert_eq!(status_of(&Error::EmptyMatrix), SteadyStatus::InvalidArgument);
        assert_eq!(status_of(&Error::DegenerateNullSpace { dim: 2 }), SteadyStatus::NotUnique);
    }

    #[test]
    fn options_round_trip_to_core_defaults() {
        let o = options(&steady_options_default());
        let d = SolverOptions::default();
        assert_eq!((o.tol, o.drop_tol, o.fill, o.restart), (d.tol, d.drop_tol, d.fill, d.restart));
        assert_eq!(o.weight, None);
        assert_eq!(o.ordering, Ordering::Rcm);
    }
}
