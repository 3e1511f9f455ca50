//! C ABI over `cyclestab`.
//!
//! Objects cross the boundary as opaque handles (`CsGains`, `CsTrajectory`)
//! created by `cs_*_new`-style constructors and released with the matching
//! `*_free`. Every fallible call returns a `CsStatus`; on failure the message
//! is available from `cs_last_error_message` on the same thread.
//!
//! Array getters follow the usual two-call pattern: they always write the
//! required element count to `*len_out` and copy only when `capacity` is
//! large enough, returning `CS_STATUS_BUFFER_TOO_SMALL` otherwise.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use cyclestab::dynamics::{self, MapModel, Trajectory};
use cyclestab::gains::{self, ControlGains};
use cyclestab::stability;
use cyclestab::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NoConvergence = 3,
    Consistency = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Opaque gain vector.
pub struct CsGains(ControlGains);

/// Opaque simulated trajectory.
pub struct CsTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: CsStatus, msg: impl Into<String>) -> CsStatus {
    set_error(msg);
    status
}

fn from_core(err: Error) -> CsStatus {
    let status = match &err {
        Error::InvalidArgument(_) => CsStatus::InvalidArgument,
        Error::NoConvergence { .. } => CsStatus::NoConvergence,
        Error::RootsAtMultiplier { source, .. } if matches!(**source, Error::NoConvergence { .. }) => {
            CsStatus::NoConvergence
        }
        _ => CsStatus::Consistency,
    };
    fail(status, err.to_string())
}

fn guard(f: impl FnOnce() -> CsStatus) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(CsStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

unsafe fn input<'a>(data: *const f64, len: usize) -> Result<&'a [f64], CsStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(fail(CsStatus::NullPointer, "input array is null"));
    }
    Ok(slice::from_raw_parts(data, len))
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, capacity: usize, len_out: *mut usize) -> CsStatus {
    if len_out.is_null() {
        return fail(CsStatus::NullPointer, "len_out is null");
    }
    *len_out = src.len();
    if capacity < src.len() {
        return fail(
            CsStatus::BufferTooSmall,
            format!("need {} elements, capacity is {capacity}", src.len()),
        );
    }
    if !src.is_empty() {
        if buf.is_null() {
            return fail(CsStatus::NullPointer, "output buffer is null");
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    }
    CsStatus::Ok
}

unsafe fn write<T>(out: *mut T, value: T) -> CsStatus {
    if out.is_null() {
        return fail(CsStatus::NullPointer, "output pointer is null");
    }
    out.write(value);
    CsStatus::Ok
}

unsafe fn gains_ref<'a>(g: *const CsGains) -> Result<&'a ControlGains, CsStatus> {
    g.as_ref()
        .map(|g| &g.0)
        .ok_or_else(|| fail(CsStatus::NullPointer, "gains handle is null"))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `capacity`). Returns the full message length excluding the
/// terminator, or 0 if there is none.
///
/// # Safety
/// `buf` must be valid for `capacity` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn cs_last_error_message(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Optimal gains for horizon `n`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_gains_optimal(n: usize, out: *mut *mut CsGains) -> CsStatus {
    guard(|| match gains::optimal_gains(n) {
        Ok(g) => write(out, boxed(CsGains(g))),
        Err(e) => from_core(e),
    })
}

/// Gains from `len` feedback strengths (horizon `len + 1`).
///
/// # Safety
/// `eps` must point to `len` doubles (may be null when `len == 0`); `out`
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_gains_from_strengths(eps: *const f64, len: usize, out: *mut *mut CsGains) -> CsStatus {
    guard(|| match input(eps, len) {
        Ok(eps) => write(out, boxed(CsGains(gains::eps_to_a(eps)))),
        Err(s) => s,
    })
}

/// Gains from `len` closed-loop weights, which must sum to 1.
///
/// # Safety
/// `a` must point to `len` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_gains_from_weights(a: *const f64, len: usize, out: *mut *mut CsGains) -> CsStatus {
    guard(|| {
        let a = match input(a, len) {
            Ok(a) => a,
            Err(s) => return s,
        };
        match gains::a_to_eps(a) {
            Ok(g) => write(out, boxed(CsGains(g))),
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `g` must come from a `cs_gains_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_gains_free(g: *mut CsGains) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Horizon `N`, or 0 for a null handle.
///
/// # Safety
/// `g` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cs_gains_horizon(g: *const CsGains) -> usize {
    g.as_ref().map_or(0, |g| g.0.horizon())
}

/// # Safety
/// `g` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cs_gains_is_admissible(g: *const CsGains) -> bool {
    g.as_ref().is_some_and(|g| g.0.is_admissible())
}

/// # Safety
/// `g` must be live; `buf` valid for `capacity` doubles; `len_out` valid.
#[no_mangle]
pub unsafe extern "C" fn cs_gains_weights(
    g: *const CsGains,
    buf: *mut f64,
    capacity: usize,
    len_out: *mut usize,
) -> CsStatus {
    guard(|| match gains_ref(g) {
        Ok(g) => copy_out(g.weights(), buf, capacity, len_out),
        Err(s) => s,
    })
}

/// # Safety
/// As for `cs_gains_weights`.
#[no_mangle]
pub unsafe extern "C" fn cs_gains_strengths(
    g: *const CsGains,
    buf: *mut f64,
    capacity: usize,
    len_out: *mut usize,
) -> CsStatus {
    guard(|| match gains_ref(g) {
        Ok(g) => copy_out(g.strengths(), buf, capacity, len_out),
        Err(s) => s,
    })
}

/// # Safety
/// As for `cs_gains_weights`.
#[no_mangle]
pub unsafe extern "C" fn cs_gains_gamma(
    g: *const CsGains,
    buf: *mut f64,
    capacity: usize,
    len_out: *mut usize,
) -> CsStatus {
    guard(|| match gains_ref(g) {
        Ok(g) => copy_out(&g.gamma(), buf, capacity, len_out),
        Err(s) => s,
    })
}

/// Critical multiplier by sweeping `mu` over `[-mu_max, 0)`. Pass
/// `mu_max <= 0` for the default range. `censored` is set when no loss of
/// stability was found in range.
///
/// # Safety
/// `g` must be live; `mu_star_abs` and `censored` valid.
#[no_mangle]
pub unsafe extern "C" fn cs_mu_star_sweep(
    g: *const CsGains,
    mu_max: f64,
    tol: f64,
    mu_star_abs: *mut f64,
    censored: *mut bool,
) -> CsStatus {
    guard(|| {
        let g = match gains_ref(g) {
            Ok(g) => g,
            Err(s) => return s,
        };
        if mu_star_abs.is_null() || censored.is_null() {
            return fail(CsStatus::NullPointer, "output pointer is null");
        }
        let mu_max = if mu_max > 0.0 {
            mu_max
        } else {
            stability::default_mu_max(g)
        };
        match stability::mu_star_by_sweep(g, mu_max, tol) {
            Ok(r) => {
                *mu_star_abs = r.mu_star_abs;
                *censored = r.censored;
                CsStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Critical multiplier from the hodograph's negative real-axis crossings.
///
/// # Safety
/// `g` must be live; `mu_star_abs` valid.
#[no_mangle]
pub unsafe extern "C" fn cs_mu_star_hodograph(g: *const CsGains, resolution: usize, mu_star_abs: *mut f64) -> CsStatus {
    guard(|| {
        let g = match gains_ref(g) {
            Ok(g) => g,
            Err(s) => return s,
        };
        match stability::mu_star_by_hodograph(g, resolution) {
            Ok(r) => write(mu_star_abs, r.mu_star_abs),
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `g` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn cs_j_value(g: *const CsGains, resolution: usize, out: *mut f64) -> CsStatus {
    guard(|| {
        let g = match gains_ref(g) {
            Ok(g) => g,
            Err(s) => return s,
        };
        match stability::j_value(g, resolution) {
            Ok(j) => write(out, j),
            Err(e) => from_core(e),
        }
    })
}

/// Smallest horizon whose optimal gains stabilize multipliers down to
/// `-mu_star_abs`, with its prehistory depth.
///
/// # Safety
/// `n0` and `n_star` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_min_horizon(mu_star_abs: f64, n0: *mut usize, n_star: *mut usize) -> CsStatus {
    guard(|| {
        if n0.is_null() || n_star.is_null() {
            return fail(CsStatus::NullPointer, "output pointer is null");
        }
        match gains::min_horizon(mu_star_abs) {
            Ok(p) => {
                *n0 = p.n0;
                *n_star = p.n_star;
                CsStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Closed-loop logistic map run. `seed` holds `2N - 1` states; pass a null
/// `seed` with `seed_len == 0` to fill the history by open-loop iteration
/// from `x0`.
///
/// # Safety
/// `g` must be live; `seed` valid for `seed_len` doubles; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn cs_simulate_logistic(
    h: f64,
    g: *const CsGains,
    x0: f64,
    seed: *const f64,
    seed_len: usize,
    steps: usize,
    out: *mut *mut CsTrajectory,
) -> CsStatus {
    guard(|| {
        let g = match gains_ref(g) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let map = match MapModel::logistic(h) {
            Ok(m) => m,
            Err(e) => return from_core(e),
        };
        let seed = match input(seed, seed_len) {
            Ok(s) if !s.is_empty() => s.to_vec(),
            Ok(_) => match dynamics::open_loop_seed(&map, x0, 2 * g.horizon() - 1) {
                Ok(s) => s,
                Err(e) => return from_core(e),
            },
            Err(s) => return s,
        };
        match dynamics::simulate_closed(&map, g, &seed, steps) {
            Ok(t) => write(out, boxed(CsTrajectory(t))),
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `t` must come from `cs_simulate_logistic` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_trajectory_free(t: *mut CsTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of states, or 0 for a null handle.
///
/// # Safety
/// `t` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn cs_trajectory_len(t: *const CsTrajectory) -> usize {
    t.as_ref().map_or(0, |t| t.0.len())
}

/// Index of the first state outside the domain, or -1 if none escaped.
///
/// # Safety
/// `t` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn cs_trajectory_escaped_at(t: *const CsTrajectory) -> i64 {
    t.as_ref().and_then(|t| t.0.escaped_at).map_or(-1, |i| i as i64)
}

/// # Safety
/// `t` must be live; `buf` valid for `capacity` doubles; `len_out` valid.
#[no_mangle]
pub unsafe extern "C" fn cs_trajectory_states(
    t: *const CsTrajectory,
    buf: *mut f64,
    capacity: usize,
    len_out: *mut usize,
) -> CsStatus {
    guard(|| match t.as_ref() {
        Some(t) => copy_out(&t.0.states, buf, capacity, len_out),
        None => fail(CsStatus::NullPointer, "trajectory handle is null"),
    })
}

/// `controls[n]` is the correction applied when producing state `n + 1`.
///
/// # Safety
/// As for `cs_trajectory_states`.
#[no_mangle]
pub unsafe extern "C" fn cs_trajectory_controls(
    t: *const CsTrajectory,
    buf: *mut f64,
    capacity: usize,
    len_out: *mut usize,
) -> CsStatus {
    guard(|| match t.as_ref() {
        Some(t) => copy_out(&t.0.controls, buf, capacity, len_out),
        None => fail(CsStatus::NullPointer, "trajectory handle is null"),
    })
}
