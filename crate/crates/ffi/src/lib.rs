//! C interface to the stein toolkit.
//!
//! Every function returns a [`SteinStatus`]; results come back through out-pointers. Objects
//! are opaque handles created by `stein_*_new`-style constructors and released with the
//! matching `*_free`. After a failure, `stein_last_error_message` describes it (per thread).
//! Panics never cross the boundary; they are reported as `STEIN_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use stein::bounds::BoundReport;
use stein::dist::{binomial_pmf, poisson_pmf, FinitePmf};
use stein::harness::config::{Document, ExperimentConfig, Params};
use stein::harness::dispatch::evaluate_bound;
use stein::harness::run_experiment;
use stein::metrics::{dk_discrete_vs_discrete, dtv_discrete, dw_integer_supported, Metric};
use stein::SteinError;

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteinStatus {
    Ok = 0,
    InvalidParameter = 1,
    InvalidDistribution = 2,
    Quadrature = 3,
    InsufficientSamples = 4,
    OracleInfeasible = 5,
    ModelBug = 6,
    Unknown = 7,
    Config = 8,
    Io = 9,
    NullPointer = 10,
    InvalidUtf8 = 11,
    Panic = 12,
}

/// Metric of a bound report.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteinMetric {
    TotalVariation = 0,
    Kolmogorov = 1,
    Wasserstein = 2,
}

/// A probability mass function on a run of consecutive integers.
pub struct SteinPmf {
    inner: FinitePmf,
}

/// A bound evaluated by name.
pub struct SteinBound {
    inner: BoundReport,
}

/// One experiment run: bound, measured distance and its interval.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SteinVerifyResult {
    pub bound: f64,
    pub distance: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub exact: bool,
    pub sound: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &SteinError) -> SteinStatus {
    match e {
        SteinError::InvalidParameter(_) => SteinStatus::InvalidParameter,
        SteinError::InvalidDistribution(_) => SteinStatus::InvalidDistribution,
        SteinError::Quadrature(_) => SteinStatus::Quadrature,
        SteinError::InsufficientSamples { .. } => SteinStatus::InsufficientSamples,
        SteinError::OracleInfeasible(_) => SteinStatus::OracleInfeasible,
        SteinError::ModelBug(_) => SteinStatus::ModelBug,
        SteinError::Unknown(_) => SteinStatus::Unknown,
        SteinError::Config(_) => SteinStatus::Config,
        SteinError::Io(_) => SteinStatus::Io,
    }
}

enum Failure {
    Stein(SteinError),
    Null(&'static str),
    Utf8(&'static str),
}

impl From<SteinError> for Failure {
    fn from(e: SteinError) -> Self {
        Failure::Stein(e)
    }
}

// runs `f`, records any failure and maps it to a status
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> SteinStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SteinStatus::Ok
        }
        Ok(Err(Failure::Stein(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            SteinStatus::NullPointer
        }
        Ok(Err(Failure::Utf8(what))) => {
            set_error(format!("{what} is not valid UTF-8"));
            SteinStatus::InvalidUtf8
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SteinStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure::Utf8(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(v);
    Ok(())
}

// boxes `v` only once `out` is known to be writable, so nothing leaks
unsafe fn give<T>(out: *mut *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    out.write(Box::into_raw(Box::new(v)));
    Ok(())
}

unsafe fn pmf_ref<'a>(p: *const SteinPmf, what: &'static str) -> Result<&'a FinitePmf, Failure> {
    p.as_ref().map(|h| &h.inner).ok_or(Failure::Null(what))
}

// "k = v" lines, ';' separated pairs, or a JSON object of parameters
fn parse_params(s: &str) -> Result<Params, SteinError> {
    let body = if s.trim_start().starts_with('{') { format!("{{\"params\": {s}}}") } else { s.replace(';', "\n") };
    let doc = Document::parse(&body)?;
    let mut p = Params::new();
    for name in ["", "params"] {
        if let Some(sec) = doc.section(name) {
            for (k, v) in &sec.0 {
                p.set(k, v.clone());
            }
        }
    }
    Ok(p)
}

/// Copy `s` into `buf` (NUL terminated, truncated to fit) and return the full length in bytes
/// without the terminator, so callers can size a second call.
unsafe fn copy_out(s: &str, buf: *mut c_char, len: usize) -> usize {
    if !buf.is_null() && len > 0 {
        let n = s.len().min(len - 1);
        std::ptr::copy_nonoverlapping(s.as_ptr() as *const c_char, buf, n);
        *buf.add(n) = 0;
    }
    s.len()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn stein_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failed call on this thread; empty after a success. Returns the full
/// message length; at most `len − 1` bytes are written.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn stein_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| copy_out(&e.borrow(), buf, len))
}

/// A pmf with P(offset + i) = probs[i]; `tail_mass` is probability not represented.
///
/// # Safety
/// `probs` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stein_pmf_new(offset: i64, probs: *const f64, len: usize, tail_mass: f64, out: *mut *mut SteinPmf) -> SteinStatus {
    guard(|| {
        if probs.is_null() {
            return Err(Failure::Null("probs"));
        }
        let v = std::slice::from_raw_parts(probs, len).to_vec();
        let pmf = FinitePmf::new(offset, v, tail_mass)?;
        give(out, SteinPmf { inner: pmf })
    })
}

/// Bin(n, p).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stein_pmf_binomial(n: u64, p: f64, out: *mut *mut SteinPmf) -> SteinStatus {
    guard(|| give(out, SteinPmf { inner: binomial_pmf(n, p)? }))
}

/// Po(λ), truncated where the remaining mass drops below `tol` (kept as tail mass).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stein_pmf_poisson(lambda: f64, tol: f64, out: *mut *mut SteinPmf) -> SteinStatus {
    guard(|| give(out, SteinPmf { inner: poisson_pmf(lambda, tol)? }))
}

/// Release a pmf; null is ignored.
///
/// # Safety
/// `pmf` must come from a `stein_pmf_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn stein_pmf_free(pmf: *mut SteinPmf) {
    if !pmf.is_null() {
        drop(Box::from_raw(pmf));
    }
}

/// Mean and variance of a pmf.
///
/// # Safety
/// `pmf` must be a live handle; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn stein_pmf_moments(pmf: *const SteinPmf, mean: *mut f64, variance: *mut f64) -> SteinStatus {
    guard(|| {
        let p = pmf_ref(pmf, "pmf")?;
        put(mean, p.mean(), "mean")?;
        put(variance, p.variance(), "variance")
    })
}

/// P(X = k).
///
/// # Safety
/// `pmf` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stein_pmf_mass(pmf: *const SteinPmf, k: i64, out: *mut f64) -> SteinStatus {
    guard(|| put(out, pmf_ref(pmf, "pmf")?.pmf(k), "out"))
}

/// Distance between two pmfs (tail mass charged as an upper correction). `metric` is a
/// `SteinMetric` value, taken as an integer so that out-of-range codes are reported.
///
/// # Safety
/// `p` and `q` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stein_pmf_distance(p: *const SteinPmf, q: *const SteinPmf, metric: i32, out: *mut f64) -> SteinStatus {
    guard(|| {
        let (a, b) = (pmf_ref(p, "p")?, pmf_ref(q, "q")?);
        let v = match metric {
            m if m == SteinMetric::TotalVariation as i32 => dtv_discrete(a, b),
            m if m == SteinMetric::Kolmogorov as i32 => dk_discrete_vs_discrete(a, b),
            m if m == SteinMetric::Wasserstein as i32 => dw_integer_supported(a, b),
            m => return Err(SteinError::InvalidParameter(format!("unknown metric code {m}")).into()),
        };
        put(out, v.value, "out")
    })
}

/// Evaluate a registered bound calculator. `params` holds `key = value` pairs separated by
/// newlines or ';' (lists are comma separated), or a JSON object.
///
/// # Safety
/// `theorem` and `params` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stein_bound_evaluate(theorem: *const c_char, params: *const c_char, out: *mut *mut SteinBound) -> SteinStatus {
    guard(|| {
        let t = text(theorem, "theorem")?;
        let p = parse_params(text(params, "params")?)?;
        let rep = evaluate_bound(t, &p)?;
        give(out, SteinBound { inner: rep })
    })
}

/// Release a bound; null is ignored.
///
/// # Safety
/// `bound` must come from `stein_bound_evaluate` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn stein_bound_free(bound: *mut SteinBound) {
    if !bound.is_null() {
        drop(Box::from_raw(bound));
    }
}

/// Value, Monte Carlo radius and metric of a bound.
///
/// # Safety
/// `bound` must be a live handle; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn stein_bound_value(bound: *const SteinBound, value: *mut f64, ci_radius: *mut f64, metric: *mut SteinMetric) -> SteinStatus {
    guard(|| {
        let b = &bound.as_ref().ok_or(Failure::Null("bound"))?.inner;
        put(value, b.value, "value")?;
        put(ci_radius, b.ci_radius, "ci_radius")?;
        let m = match b.metric {
            Metric::Tv => SteinMetric::TotalVariation,
            Metric::Kolmogorov => SteinMetric::Kolmogorov,
            Metric::Wasserstein => SteinMetric::Wasserstein,
        };
        put(metric, m, "metric")
    })
}

/// The full report (inputs, terms, notes) as JSON. Returns the JSON length; at most
/// `len − 1` bytes are written. Returns 0 for a null handle.
///
/// # Safety
/// `bound` must be null or a live handle; `buf` must be null or hold `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn stein_bound_json(bound: *const SteinBound, buf: *mut c_char, len: usize) -> usize {
    match bound.as_ref() {
        Some(b) => copy_out(&serde_json::to_string(&b.inner).unwrap_or_default(), buf, len),
        None => 0,
    }
}

/// Run a registered experiment at its default oracle, with optional parameter overrides
/// (same syntax as `stein_bound_evaluate`; null for none).
///
/// # Safety
/// `experiment` must be a NUL-terminated string, `params` null or one; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stein_verify(experiment: *const c_char, params: *const c_char, seed: u64, out: *mut SteinVerifyResult) -> SteinStatus {
    guard(|| {
        let mut cfg = ExperimentConfig::new(text(experiment, "experiment")?, seed);
        if !params.is_null() {
            cfg.params = parse_params(text(params, "params")?)?;
        }
        let rec = run_experiment(&cfg, false)?;
        let o = rec.outcome.map_err(SteinError::ModelBug)?;
        let r = SteinVerifyResult { bound: o.bound, distance: o.distance, ci_low: o.ci_low, ci_high: o.ci_high, exact: o.exact, sound: o.sound() };
        put(out, r, "out")
    })
}
