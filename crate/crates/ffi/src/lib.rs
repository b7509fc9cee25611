//! C interface to `sic-core`.
//!
//! Vectors cross the boundary as `2d` interleaved doubles
//! `re_0, im_0, re_1, im_1, ...`. Every function returns a [`SicStatus`];
//! on failure [`sic_last_error_message`] describes the error for the calling
//! thread. Handles are opaque and must be released with their `_free`
//! function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use sic_core::classify::stabiliser;
use sic_core::clifford::pec_order;
use sic_core::objective::{unpack, verify_sic, welch_functional, welch_gradient, FiducialCandidate};
use sic_core::search::{multi_start_search, Convergence, SearchConfig, SearchResult};
use sic_core::symmetry::{build_symmetry, SymmetryKind};
use sic_core::{Dim, SicError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SicStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Capacity = 3,
    NotFound = 4,
    Internal = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &SicError) -> SicStatus {
    match err {
        SicError::Capacity { .. } => SicStatus::Capacity,
        SicError::Structural(_) | SicError::Io(_) => SicStatus::Internal,
        _ => SicStatus::InvalidArgument,
    }
}

fn fail(status: SicStatus, message: impl Into<String>) -> SicStatus {
    set_error(message.into());
    status
}

/// Run `body`, recording errors and converting panics to `Internal`.
fn guarded(body: impl FnOnce() -> Result<(), SicStatus>) -> SicStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SicStatus::Ok,
        Ok(Err(status)) => status,
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(SicStatus::Internal, format!("internal error: {msg}"))
        }
    }
}

fn core<T>(r: sic_core::Result<T>) -> Result<T, SicStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), SicStatus> {
    if p.is_null() {
        Err(fail(SicStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `v` must be non-null with `2 * d` readable doubles.
unsafe fn read_vector(v: *const f64, d: usize) -> Result<Vec<sic_core::C64>, SicStatus> {
    non_null(v, "vector")?;
    if d < 2 {
        return Err(fail(SicStatus::InvalidArgument, format!("invalid dimension {d}: need d >= 2")));
    }
    Ok(unpack(slice::from_raw_parts(v, 2 * d)))
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sic_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Order of the projective extended Clifford group in dimension `d`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sic_pec_order(d: i64, out: *mut u64) -> SicStatus {
    guarded(|| {
        non_null(out, "out")?;
        let dim = core(Dim::new(d))?;
        *out = pec_order(dim);
        Ok(())
    })
}

/// Welch functional of the normalized vector; zero exactly at fiducials.
///
/// # Safety
/// `v` must hold `2 * d` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sic_welch_functional(v: *const f64, d: usize, out: *mut f64) -> SicStatus {
    guarded(|| {
        non_null(out, "out")?;
        let phi = read_vector(v, d)?;
        *out = core(welch_functional(&phi))?;
        Ok(())
    })
}

/// Gradient of the functional in the interleaved real coordinates.
///
/// # Safety
/// `v` must hold `2 * d` doubles; `grad` must have room for `2 * d`.
#[no_mangle]
pub unsafe extern "C" fn sic_welch_gradient(v: *const f64, d: usize, grad: *mut f64) -> SicStatus {
    guarded(|| {
        non_null(grad, "grad")?;
        let phi = read_vector(v, d)?;
        let g = core(welch_gradient(&phi))?;
        slice::from_raw_parts_mut(grad, 2 * d).copy_from_slice(&g);
        Ok(())
    })
}

/// Direct equiangularity check. `max_dev` receives the largest overlap
/// deviation and `pass` whether it is within `tol`.
///
/// # Safety
/// `v` must hold `2 * d` doubles; `max_dev` and `pass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sic_verify(
    v: *const f64,
    d: usize,
    tol: f64,
    max_dev: *mut f64,
    pass: *mut bool,
) -> SicStatus {
    guarded(|| {
        non_null(max_dev, "max_dev")?;
        non_null(pass, "pass")?;
        let phi = read_vector(v, d)?;
        let report = core(verify_sic(&phi, tol))?;
        *max_dev = report.max_dev;
        *pass = report.pass;
        Ok(())
    })
}

/// Order of the extended-Clifford stabiliser of a fiducial (`d <= 12`).
///
/// # Safety
/// `v` must hold `2 * d` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sic_stabiliser_order(v: *const f64, d: usize, tol: f64, out: *mut u64) -> SicStatus {
    guarded(|| {
        non_null(out, "out")?;
        let phi = read_vector(v, d)?;
        let cand = core(FiducialCandidate::new(&phi, 0, None))?;
        *out = core(stabiliser(&cand, tol))?.order;
        Ok(())
    })
}

/// Opaque search configuration.
pub struct SicSearchConfig {
    inner: SearchConfig,
}

/// Opaque search results, in trial order.
pub struct SicSearchResults {
    dim: usize,
    results: Vec<SearchResult>,
}

/// New configuration with default settings for dimension `d`.
///
/// # Safety
/// `out` must be writable. Free the handle with [`sic_search_config_free`].
#[no_mangle]
pub unsafe extern "C" fn sic_search_config_new(d: i64, out: *mut *mut SicSearchConfig) -> SicStatus {
    guarded(|| {
        non_null(out, "out")?;
        let dim = core(Dim::new(d))?;
        *out = Box::into_raw(Box::new(SicSearchConfig { inner: SearchConfig::new(dim) }));
        Ok(())
    })
}

/// # Safety
/// `config` must be null or a handle from [`sic_search_config_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sic_search_config_free(config: *mut SicSearchConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

unsafe fn config_mut<'a>(config: *mut SicSearchConfig) -> Result<&'a mut SearchConfig, SicStatus> {
    non_null(config, "config")?;
    Ok(&mut (*config).inner)
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sic_search_config_set_trials(config: *mut SicSearchConfig, trials: u64) -> SicStatus {
    guarded(|| {
        config_mut(config)?.trials = trials;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sic_search_config_set_seed(config: *mut SicSearchConfig, seed: u64) -> SicStatus {
    guarded(|| {
        config_mut(config)?.master_seed = seed;
        Ok(())
    })
}

/// Worker threads; results do not depend on this value.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sic_search_config_set_workers(config: *mut SicSearchConfig, workers: usize) -> SicStatus {
    guarded(|| {
        config_mut(config)?.workers = workers;
        Ok(())
    })
}

/// Restrict the search to the eigenvalue sector `eigenvalue` of the named
/// symmetry (`fz`, `fa`, `fb`, `fc`, `fd`, `fe`, `fep`, `j`), or
/// lift the restriction with `none`.
///
/// # Safety
/// `config` must be a live handle; `name` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sic_search_config_set_symmetry(
    config: *mut SicSearchConfig,
    name: *const c_char,
    eigenvalue: u64,
) -> SicStatus {
    guarded(|| {
        let cfg = config_mut(config)?;
        non_null(name, "name")?;
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| fail(SicStatus::InvalidArgument, "symmetry name is not UTF-8"))?
            .to_ascii_lowercase();
        if name == "none" {
            cfg.symmetry = None;
            return Ok(());
        }
        let kind: SymmetryKind = core(name.parse())?;
        let spec = core(build_symmetry(kind, cfg.dim))?;
        cfg.symmetry = Some((spec, eigenvalue));
        Ok(())
    })
}

/// Run the multi-start search. Returns `NotFound` (with `*out` still set)
/// when no trial converged to a fiducial.
///
/// # Safety
/// `config` must be a live handle; `out` writable. Free the results with
/// [`sic_search_results_free`].
#[no_mangle]
pub unsafe extern "C" fn sic_search_run(config: *const SicSearchConfig, out: *mut *mut SicSearchResults) -> SicStatus {
    guarded(|| {
        non_null(config, "config")?;
        non_null(out, "out")?;
        let cfg = &(*config).inner;
        let results = core(multi_start_search(cfg))?;
        let any = results.iter().any(|r| r.converged_to == Convergence::Fiducial);
        *out = Box::into_raw(Box::new(SicSearchResults { dim: cfg.dim.size(), results }));
        if any {
            Ok(())
        } else {
            Err(fail(SicStatus::NotFound, "no trial converged to a fiducial"))
        }
    })
}

/// # Safety
/// `results` must be null or a handle from [`sic_search_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sic_search_results_free(results: *mut SicSearchResults) {
    if !results.is_null() {
        drop(Box::from_raw(results));
    }
}

/// Number of trials in `results`, or 0 for a null handle.
///
/// # Safety
/// `results` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sic_search_results_count(results: *const SicSearchResults) -> usize {
    results.as_ref().map_or(0, |r| r.results.len())
}

/// Trial `index`: its final vector (`2 * d` doubles into `v`), trial number,
/// objective gap and whether it verified as a fiducial.
///
/// # Safety
/// `results` must be a live handle; `v` must have room for `v_len` doubles;
/// the remaining out-pointers must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn sic_search_results_get(
    results: *const SicSearchResults,
    index: usize,
    v: *mut f64,
    v_len: usize,
    trial: *mut u64,
    gap: *mut f64,
    is_fiducial: *mut bool,
) -> SicStatus {
    guarded(|| {
        non_null(results, "results")?;
        non_null(v, "v")?;
        let res = &*results;
        let r = res.results.get(index).ok_or_else(|| {
            fail(SicStatus::InvalidArgument, format!("index {index} out of range ({} results)", res.results.len()))
        })?;
        if v_len < 2 * res.dim {
            return Err(fail(
                SicStatus::InvalidArgument,
                format!("buffer holds {v_len} doubles; need {}", 2 * res.dim),
            ));
        }
        let out = slice::from_raw_parts_mut(v, 2 * res.dim);
        for (chunk, z) in out.chunks_exact_mut(2).zip(&r.candidate.components) {
            chunk[0] = z.re;
            chunk[1] = z.im;
        }
        if !trial.is_null() {
            *trial = r.trial_index;
        }
        if !gap.is_null() {
            *gap = r.candidate.objective_gap;
        }
        if !is_fiducial.is_null() {
            *is_fiducial = r.converged_to == Convergence::Fiducial;
        }
        Ok(())
    })
}
