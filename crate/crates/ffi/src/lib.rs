//! C interface to the `hauv-ipp` planners.
//!
//! Objects are opaque handles created by `hauv_*_new`/`hauv_plan` and
//! released with the matching `*_free`. Every fallible call returns a
//! [`HauvStatus`]; on failure [`hauv_last_error`] describes the problem for
//! the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use hauv_ipp::bench::scenario;
use hauv_ipp::env::{Environment, ObstacleSet, Workspace};
use hauv_ipp::ingest::{environment_from_grid, load_forecast_grid};
use hauv_ipp::path::Task;
use hauv_ipp::planners::{plan, Algorithm, PlannerConfig, PlannerResult};
use hauv_ipp::vehicle::VehicleModel;
use hauv_ipp::{Error, Point3};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HauvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Planner = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HauvAlgorithm {
    RastIe = 0,
    RastI = 1,
    Rast = 2,
    Rrst = 3,
    Rigt = 4,
    Pso = 5,
}

impl From<HauvAlgorithm> for Algorithm {
    fn from(a: HauvAlgorithm) -> Self {
        match a {
            HauvAlgorithm::RastIe => Algorithm::RastIe,
            HauvAlgorithm::RastI => Algorithm::RastI,
            HauvAlgorithm::Rast => Algorithm::Rast,
            HauvAlgorithm::Rrst => Algorithm::Rrst,
            HauvAlgorithm::Rigt => Algorithm::Rigt,
            HauvAlgorithm::Pso => Algorithm::Pso,
        }
    }
}

/// A planning environment.
pub struct HauvEnvironment {
    env: Environment,
}

/// The outcome of one planner run.
pub struct HauvPlanResult {
    result: PlannerResult,
    points: Vec<Point3>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> HauvStatus {
    match e {
        Error::Io { .. } | Error::Json { .. } => HauvStatus::Io,
        Error::PsoInitialization { .. } => HauvStatus::Planner,
        _ => HauvStatus::InvalidArgument,
    }
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), (HauvStatus, String)>) -> HauvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            HauvStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HauvStatus::Panic
        }
    }
}

fn fail(e: Error) -> (HauvStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (HauvStatus, String) {
    (HauvStatus::NullPointer, format!("{what} is null"))
}

/// Message for the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn hauv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hauv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds the environment of built-in scenario `id` (1 to 5).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hauv_environment_from_scenario(id: u32, out: *mut *mut HauvEnvironment) -> HauvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let env = scenario(id).and_then(|s| s.build_environment()).map_err(fail)?;
        unsafe { *out = Box::into_raw(Box::new(HauvEnvironment { env })) };
        Ok(())
    })
}

/// Builds an environment from an IPGRID file on the standard workspace,
/// without obstacles.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hauv_environment_from_ipgrid(
    path: *const c_char,
    kappa_air: f64,
    kappa_sea: f64,
    out: *mut *mut HauvEnvironment,
) -> HauvStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let path = unsafe { CStr::from_ptr(path) }
            .to_str()
            .map_err(|_| (HauvStatus::InvalidArgument, "path is not UTF-8".to_string()))?;
        let raw = load_forecast_grid(Path::new(path)).map_err(fail)?;
        let env = environment_from_grid(&raw, &Workspace::standard(), kappa_air, kappa_sea, ObstacleSet::empty())
            .map_err(fail)?;
        unsafe { *out = Box::into_raw(Box::new(HauvEnvironment { env })) };
        Ok(())
    })
}

/// Hash of the environment contents.
///
/// # Safety
/// `env` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hauv_environment_fingerprint(env: *const HauvEnvironment) -> u64 {
    unsafe { env.as_ref() }.map_or(0, |e| e.env.fingerprint())
}

/// # Safety
/// `env` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hauv_environment_free(env: *mut HauvEnvironment) {
    if !env.is_null() {
        drop(unsafe { Box::from_raw(env) });
    }
}

/// Planner run parameters. Zero `max_it` or `it_stop` keep the defaults;
/// `t_max` may be `INFINITY`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct HauvPlanRequest {
    pub algorithm: HauvAlgorithm,
    pub start: [f64; 3],
    pub goal: [f64; 3],
    pub t_max: f64,
    pub seed: u64,
    pub max_it: u32,
    pub it_stop: u32,
}

/// Runs one planner with the default vehicle. A run that finds no feasible
/// path still succeeds, with `hauv_result_best_ig` returning 0.
///
/// # Safety
/// `env` must be a live handle, `request` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hauv_plan(
    env: *const HauvEnvironment,
    request: *const HauvPlanRequest,
    out: *mut *mut HauvPlanResult,
) -> HauvStatus {
    guard(|| {
        let env = unsafe { env.as_ref() }.ok_or_else(|| null("env"))?;
        let req = unsafe { request.as_ref() }.ok_or_else(|| null("request"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut config = PlannerConfig::default();
        if req.max_it > 0 {
            config.max_it = req.max_it as usize;
        }
        if req.it_stop > 0 {
            config.it_stop = req.it_stop as usize;
        }
        let task = Task::new(Point3::from(req.start), Point3::from(req.goal), req.t_max);
        let model = VehicleModel::default();
        let result = plan(req.algorithm.into(), &env.env, &model, &task, &config, req.seed).map_err(fail)?;
        let points = result
            .best
            .as_ref()
            .map(|b| b.path.positions().collect())
            .unwrap_or_default();
        unsafe { *out = Box::into_raw(Box::new(HauvPlanResult { result, points })) };
        Ok(())
    })
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hauv_result_best_ig(r: *const HauvPlanResult) -> f64 {
    unsafe { r.as_ref() }.map_or(0.0, |r| r.result.best_ig)
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hauv_result_iterations(r: *const HauvPlanResult) -> usize {
    unsafe { r.as_ref() }.map_or(0, |r| r.result.iterations)
}

/// Energy and mission time of the best path; NaN without one.
///
/// # Safety
/// `r` must be null or a live handle; `energy` and `time` null or writable.
#[no_mangle]
pub unsafe extern "C" fn hauv_result_budget(r: *const HauvPlanResult, energy: *mut f64, time: *mut f64) {
    let best = unsafe { r.as_ref() }.and_then(|r| r.result.best.as_ref());
    let (e, t) = best.map_or((f64::NAN, f64::NAN), |b| (b.e, b.t));
    if let Some(p) = unsafe { energy.as_mut() } {
        *p = e;
    }
    if let Some(p) = unsafe { time.as_mut() } {
        *p = t;
    }
}

/// Number of samples on the best path (0 without one).
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hauv_result_path_len(r: *const HauvPlanResult) -> usize {
    unsafe { r.as_ref() }.map_or(0, |r| r.points.len())
}

/// Copies up to `cap` path samples as x, y, z triples into `xyz` (room for
/// `3 * cap` doubles) and returns how many were written.
///
/// # Safety
/// `r` must be a live handle and `xyz` valid for `3 * cap` writes.
#[no_mangle]
pub unsafe extern "C" fn hauv_result_path(r: *const HauvPlanResult, xyz: *mut f64, cap: usize) -> usize {
    let (Some(r), false) = (unsafe { r.as_ref() }, xyz.is_null()) else {
        return 0;
    };
    let n = r.points.len().min(cap);
    let out = unsafe { std::slice::from_raw_parts_mut(xyz, 3 * n) };
    for (chunk, p) in out.chunks_exact_mut(3).zip(&r.points) {
        chunk.copy_from_slice(&[p.x, p.y, p.z]);
    }
    n
}

/// Copies up to `cap` entries of the best-so-far series and returns how many
/// were written. Pass a null buffer to query the length.
///
/// # Safety
/// `r` must be a live handle; `out` null or valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn hauv_result_bestsol(r: *const HauvPlanResult, out: *mut f64, cap: usize) -> usize {
    let Some(r) = (unsafe { r.as_ref() }) else {
        return 0;
    };
    let series = &r.result.bestsol;
    if out.is_null() {
        return series.len();
    }
    let n = series.len().min(cap);
    unsafe { ptr::copy_nonoverlapping(series.as_ptr(), out, n) };
    n
}

/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hauv_result_free(r: *mut HauvPlanResult) {
    if !r.is_null() {
        drop(unsafe { Box::from_raw(r) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        unsafe { CStr::from_ptr(hauv_last_error()) }.to_string_lossy().into_owned()
    }

    #[test]
    fn null_arguments_are_reported() {
        let s = unsafe { hauv_environment_from_scenario(1, ptr::null_mut()) };
        assert_eq!(s, HauvStatus::NullPointer);
        assert!(last_error().contains("out"));
        let s = unsafe { hauv_plan(ptr::null(), ptr::null(), ptr::null_mut()) };
        assert_eq!(s, HauvStatus::NullPointer);
        unsafe {
            hauv_environment_free(ptr::null_mut());
            hauv_result_free(ptr::null_mut());
        }
    }

    #[test]
    fn bad_scenario_and_missing_file() {
        let mut env = ptr::null_mut();
        assert_eq!(unsafe { hauv_environment_from_scenario(42, &mut env) }, HauvStatus::InvalidArgument);
        assert!(env.is_null());
        assert!(last_error().contains("42"));
        let path = CString::new("/nonexistent/grid.ipgrid").unwrap();
        let s = unsafe { hauv_environment_from_ipgrid(path.as_ptr(), 1.0, 1.0, &mut env) };
        assert_eq!(s, HauvStatus::Io);
    }

    #[test]
    fn plans_through_handles() {
        let mut env = ptr::null_mut();
        assert_eq!(unsafe { hauv_environment_from_scenario(1, &mut env) }, HauvStatus::Ok);
        assert_ne!(unsafe { hauv_environment_fingerprint(env) }, 0);
        let req = HauvPlanRequest {
            algorithm: HauvAlgorithm::Rast,
            start: [1000.0, 3750.0, 0.0],
            goal: [4000.0, 3750.0, 0.0],
            t_max: f64::INFINITY,
            seed: 9,
            max_it: 300,
            it_stop: 100,
        };
        let mut res = ptr::null_mut();
        assert_eq!(unsafe { hauv_plan(env, &req, &mut res) }, HauvStatus::Ok);
        let ig = unsafe { hauv_result_best_ig(res) };
        assert!(ig > 0.0);
        let n = unsafe { hauv_result_path_len(res) };
        let mut xyz = vec![0.0; 3 * n];
        assert_eq!(unsafe { hauv_result_path(res, xyz.as_mut_ptr(), n) }, n);
        assert_eq!(&xyz[..3], &req.start);
        assert_eq!(&xyz[3 * n - 3..], &req.goal);
        let len = unsafe { hauv_result_bestsol(res, ptr::null_mut(), 0) };
        assert_eq!(len, unsafe { hauv_result_iterations(res) });
        let mut series = vec![0.0; len];
        unsafe { hauv_result_bestsol(res, series.as_mut_ptr(), len) };
        assert_eq!(*series.last().unwrap(), ig);
        let (mut e, mut t) = (0.0, 0.0);
        unsafe { hauv_result_budget(res, &mut e, &mut t) };
        assert!(e <= 1.0 && t > 0.0);

        // out-of-workspace start
        let bad = HauvPlanRequest {
            start: [-10.0, 0.0, 0.0],
            ..req
        };
        let mut res2 = ptr::null_mut();
        assert_eq!(unsafe { hauv_plan(env, &bad, &mut res2) }, HauvStatus::InvalidArgument);
        assert!(res2.is_null());
        unsafe {
            hauv_result_free(res);
            hauv_environment_free(env);
        }
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(hauv_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
