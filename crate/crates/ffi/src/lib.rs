//! C ABI over the `scancover` crate.
//!
//! Instances and schedules are opaque heap handles released with their
//! `*_free` function. Every call returns an [`ScStatus`]; on failure the
//! message is available from [`sc_last_error`] until the next failing call
//! on the same thread. Panics are caught at the boundary and reported as
//! [`ScStatus::Internal`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use scancover::bench::{run_algorithm, Algorithm, SolveOptions};
use scancover::exact::Budget;
use scancover::instances::{gen_celestial, gen_random, read_instance, write_instance, CelestialParams, RandomParams};
use scancover::model::{evaluate, lambda_of, validate};
use scancover::{Error, Instance, Objective, ScanCover};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Domain = 4,
    BudgetExhausted = 5,
    NotBipartite = 6,
    Io = 7,
    Internal = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScObjective {
    Makespan = 0,
    TotalEnergy = 1,
    BottleneckEnergy = 2,
}

impl From<ScObjective> for Objective {
    fn from(o: ScObjective) -> Self {
        match o {
            ScObjective::Makespan => Objective::Makespan,
            ScObjective::TotalEnergy => Objective::TotalEnergy,
            ScObjective::BottleneckEnergy => Objective::BottleneckEnergy,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScEvaluation {
    pub makespan: f64,
    pub total_energy: f64,
    pub bottleneck_energy: f64,
}

/// Opaque instance handle.
pub struct ScInstance(Instance);

/// Opaque schedule handle.
pub struct ScSchedule(ScanCover);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ScStatus {
    match e {
        Error::Parse { .. } => ScStatus::Parse,
        Error::BudgetExhausted { .. } => ScStatus::BudgetExhausted,
        Error::NotBipartite { .. } => ScStatus::NotBipartite,
        Error::Io(_) => ScStatus::Io,
        Error::InvalidParams(_) => ScStatus::InvalidArgument,
        _ => ScStatus::Domain,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (ScStatus, String)>) -> ScStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ScStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            ScStatus::Internal
        }
    }
}

fn lift<T>(r: Result<T, Error>) -> Result<T, (ScStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (ScStatus, String) {
    (ScStatus::NullPointer, format!("{what} is null"))
}

unsafe fn cstr<'a>(p: *const c_char, what: &str) -> Result<&'a str, (ScStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (ScStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (ScStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread; empty if none. Valid until the next failure.
#[no_mangle]
pub extern "C" fn sc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses the plain-text instance format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_instance_parse(text: *const c_char, out: *mut *mut ScInstance) -> ScStatus {
    guard(|| {
        let inst = lift(read_instance(cstr(text, "text")?))?;
        put(out, ScInstance(inst))
    })
}

/// Builds a planar instance from `n` points (`xy` holds `2n` doubles) and
/// `m` edges (`edges` holds `2m` vertex ids).
///
/// # Safety
/// `xy` and `edges` must point to arrays of the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn sc_instance_plane(
    xy: *const f64,
    n: usize,
    edges: *const usize,
    m: usize,
    out: *mut *mut ScInstance,
) -> ScStatus {
    guard(|| {
        if (xy.is_null() && n > 0) || (edges.is_null() && m > 0) {
            return Err(null("coordinate or edge array"));
        }
        let xy = if n == 0 { &[][..] } else { std::slice::from_raw_parts(xy, 2 * n) };
        let es = if m == 0 { &[][..] } else { std::slice::from_raw_parts(edges, 2 * m) };
        let pts: Vec<(f64, f64)> = xy.chunks(2).map(|c| (c[0], c[1])).collect();
        let pairs = es.chunks(2).map(|c| (c[0], c[1])).collect();
        let inst = lift(Instance::plane(&pts, pairs).map_err(Error::from))?;
        put(out, ScInstance(inst))
    })
}

/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_instance_random(n: usize, p: f64, seed: u64, out: *mut *mut ScInstance) -> ScStatus {
    guard(|| {
        let inst = lift(gen_random(RandomParams { n, p, seed }))?;
        put(out, ScInstance(inst))
    })
}

/// Celestial instance with unit orbit and obstacle radius 0.5.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_instance_celestial(n: usize, seed: u64, out: *mut *mut ScInstance) -> ScStatus {
    guard(|| {
        let inst = lift(gen_celestial(CelestialParams::new(n, seed)))?;
        put(out, ScInstance(inst))
    })
}

/// # Safety
/// `inst` must come from an `sc_instance_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sc_instance_free(inst: *mut ScInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sc_instance_num_vertices(inst: *const ScInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.num_vertices())
}

/// # Safety
/// `inst` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sc_instance_num_edges(inst: *const ScInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.num_edges())
}

/// Serialises an instance; release the string with [`sc_string_free`].
///
/// # Safety
/// `inst` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_instance_write(inst: *const ScInstance, out: *mut *mut c_char) -> ScStatus {
    guard(|| {
        let inst = inst.as_ref().ok_or_else(|| null("instance"))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = CString::new(write_instance(&inst.0)).expect("no NUL in instance text").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Λ(v) in degrees.
///
/// # Safety
/// `inst` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_lambda(inst: *const ScInstance, v: usize, out: *mut f64) -> ScStatus {
    guard(|| {
        let inst = inst.as_ref().ok_or_else(|| null("instance"))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        if v >= inst.0.num_vertices() {
            return Err((ScStatus::InvalidArgument, format!("vertex {v} out of range")));
        }
        *out = lambda_of(&inst.0, v).lambda;
        Ok(())
    })
}

/// Runs an algorithm by name (`oned`, `bf`, `bnb`, `two-approx`, `log-k`,
/// `greedy`, `ils`, `sa`, `ga`). `node_budget == 0` keeps the default
/// budget; otherwise the run is deterministic with that many search nodes.
///
/// # Safety
/// `inst` must be a live handle, `algorithm` NUL-terminated, `out` writable;
/// `value` may be null.
#[no_mangle]
pub unsafe extern "C" fn sc_solve(
    inst: *const ScInstance,
    algorithm: *const c_char,
    objective: ScObjective,
    seed: u64,
    node_budget: u64,
    out: *mut *mut ScSchedule,
    value: *mut f64,
) -> ScStatus {
    guard(|| {
        let inst = inst.as_ref().ok_or_else(|| null("instance"))?;
        let algo: Algorithm = cstr(algorithm, "algorithm")?
            .parse()
            .map_err(|e: String| (ScStatus::InvalidArgument, e))?;
        let opts = SolveOptions {
            budget: if node_budget == 0 { Budget::default() } else { Budget::nodes(node_budget) },
            seed,
            deterministic: node_budget != 0,
            ..SolveOptions::default()
        };
        let r = lift(run_algorithm(&inst.0, algo, objective.into(), &opts))?;
        if !value.is_null() {
            *value = r.value;
        }
        put(out, ScSchedule(r.schedule))
    })
}

/// Schedule from `m` scan times, one per edge in instance order.
///
/// # Safety
/// `times` must hold `m` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_schedule_from_times(times: *const f64, m: usize, out: *mut *mut ScSchedule) -> ScStatus {
    guard(|| {
        if times.is_null() && m > 0 {
            return Err(null("times"));
        }
        let ts = if m == 0 { Vec::new() } else { std::slice::from_raw_parts(times, m).to_vec() };
        let sc = lift(ScanCover::new(ts).map_err(Error::from))?;
        put(out, ScSchedule(sc))
    })
}

/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sc_schedule_len(s: *const ScSchedule) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

/// Copies up to `cap` times into `buf`.
///
/// # Safety
/// `s` must be a live handle and `buf` hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn sc_schedule_times(s: *const ScSchedule, buf: *mut f64, cap: usize) -> ScStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("schedule"))?;
        if buf.is_null() && cap > 0 {
            return Err(null("buffer"));
        }
        let n = cap.min(s.0.len());
        if n > 0 {
            ptr::copy_nonoverlapping(s.0.times().as_ptr(), buf, n);
        }
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sc_schedule_free(s: *mut ScSchedule) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of violated separation constraints (0 means valid).
///
/// # Safety
/// Both handles must be live and `violations` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_validate(inst: *const ScInstance, s: *const ScSchedule, violations: *mut usize) -> ScStatus {
    guard(|| {
        let inst = inst.as_ref().ok_or_else(|| null("instance"))?;
        let s = s.as_ref().ok_or_else(|| null("schedule"))?;
        if violations.is_null() {
            return Err(null("output pointer"));
        }
        *violations = lift(validate(&inst.0, &s.0).map_err(Error::from))?.violations.len();
        Ok(())
    })
}

/// Objective values of a valid schedule.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_evaluate(inst: *const ScInstance, s: *const ScSchedule, out: *mut ScEvaluation) -> ScStatus {
    guard(|| {
        let inst = inst.as_ref().ok_or_else(|| null("instance"))?;
        let s = s.as_ref().ok_or_else(|| null("schedule"))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let ev = lift(evaluate(&inst.0, &s.0).map_err(Error::from))?;
        *out = ScEvaluation {
            makespan: ev.makespan,
            total_energy: ev.total_energy,
            bottleneck_energy: ev.bottleneck_energy,
        };
        Ok(())
    })
}
