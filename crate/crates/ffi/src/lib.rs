//! C interface to the simulator and the session miner.
//!
//! Every object crosses the boundary as an opaque pointer created by a
//! `*_new`/producer call and released by the matching `*_free`. Calls return
//! a [`HandyStatus`]; on failure `handy_last_error` describes the problem.
//! Strings handed out by the library must be released with
//! `handy_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use handy::domain::ServiceId;
use handy::mining::{mine_fp_growth, LogDatabase, MiningResults};
use handy::sim::{self, MetricsReport, SimConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HandyStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    MiningFailed = 4,
    NotFound = 5,
    Panic = 6,
}

pub struct HandyConfig(SimConfig);
pub struct HandyReport(MetricsReport);
pub struct HandyLog(LogDatabase);
pub struct HandyMining(MiningResults);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: HandyStatus, msg: impl Into<String>) -> HandyStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning a panic into `Panic` instead of unwinding into C.
fn guard(f: impl FnOnce() -> HandyStatus + UnwindSafe) -> HandyStatus {
    clear_error();
    match catch_unwind(f) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(HandyStatus::Panic, msg)
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, HandyStatus> {
    if p.is_null() {
        return Err(fail(HandyStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(HandyStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn out_string(s: String, out: *mut *mut c_char) -> HandyStatus {
    if out.is_null() {
        return fail(HandyStatus::NullArgument, "output pointer is null");
    }
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            HandyStatus::Ok
        }
        Err(_) => fail(HandyStatus::Panic, "string contains a nul byte"),
    }
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! handle {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(h) => h,
            None => return fail(HandyStatus::NullArgument, concat!(stringify!($p), " is null")),
        }
    };
}

/// Message for the most recent failed call on this thread, or null. The
/// pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn handy_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn handy_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---- configuration ----

/// A configuration holding the defaults.
#[no_mangle]
pub extern "C" fn handy_config_new() -> *mut HandyConfig {
    Box::into_raw(Box::new(HandyConfig(SimConfig::default())))
}

/// # Safety
/// `cfg` must come from `handy_config_new` or be null.
#[no_mangle]
pub unsafe extern "C" fn handy_config_free(cfg: *mut HandyConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Applies `key = value` lines (comments with `#`) on top of `cfg`.
///
/// # Safety
/// `cfg` must be a live handle and `source` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn handy_config_apply(cfg: *mut HandyConfig, source: *const c_char) -> HandyStatus {
    guard(|| {
        let t = try_ffi!(text(source, "source"));
        let Some(c) = cfg.as_mut() else {
            return fail(HandyStatus::NullArgument, "cfg is null");
        };
        match c.0.apply_text(t) {
            Ok(()) => HandyStatus::Ok,
            Err(e) => fail(HandyStatus::InvalidConfig, e.to_string()),
        }
    })
}

/// # Safety
/// `cfg` must be a live handle; `key` and `value` nul-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn handy_config_set(cfg: *mut HandyConfig, key: *const c_char, value: *const c_char) -> HandyStatus {
    guard(|| {
        let k = try_ffi!(text(key, "key"));
        let v = try_ffi!(text(value, "value"));
        let Some(c) = cfg.as_mut() else {
            return fail(HandyStatus::NullArgument, "cfg is null");
        };
        match c.0.set(k, v) {
            Ok(()) => HandyStatus::Ok,
            Err(e) => fail(HandyStatus::InvalidConfig, e.to_string()),
        }
    })
}

/// Current value of `key` as text; free it with `handy_string_free`.
///
/// # Safety
/// `cfg` must be a live handle, `key` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn handy_config_get(cfg: *const HandyConfig, key: *const c_char, out: *mut *mut c_char) -> HandyStatus {
    guard(|| {
        let k = try_ffi!(text(key, "key"));
        let c = handle!(cfg);
        match c.0.get(k) {
            Some(v) => out_string(v, out),
            None => fail(HandyStatus::NotFound, format!("unknown key '{k}'")),
        }
    })
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn handy_config_validate(cfg: *const HandyConfig) -> HandyStatus {
    guard(|| match handle!(cfg).0.validate() {
        Ok(()) => HandyStatus::Ok,
        Err(e) => fail(HandyStatus::InvalidConfig, e.to_string()),
    })
}

// ---- simulation ----

/// Runs one simulation and stores the report in `*out`.
///
/// # Safety
/// `cfg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn handy_run(cfg: *const HandyConfig, out: *mut *mut HandyReport) -> HandyStatus {
    guard(|| {
        let c = handle!(cfg);
        if out.is_null() {
            return fail(HandyStatus::NullArgument, "out is null");
        }
        match sim::run(&c.0) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(HandyReport(r)));
                HandyStatus::Ok
            }
            Err(e) => fail(HandyStatus::InvalidConfig, e.to_string()),
        }
    })
}

/// # Safety
/// `r` must come from `handy_run` or be null.
#[no_mangle]
pub unsafe extern "C" fn handy_report_free(r: *mut HandyReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Request outcome counts of a finished run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HandySummary {
    pub requests: u64,
    pub local_hits: u64,
    pub remote_hits: u64,
    pub failures: u64,
    pub hit_ratio: f64,
    pub latency_mean: f64,
    pub energy_total: f64,
    pub energy_mean: f64,
}

/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn handy_report_summary(r: *const HandyReport, out: *mut HandySummary) -> HandyStatus {
    guard(|| {
        let r = &handle!(r).0;
        if out.is_null() {
            return fail(HandyStatus::NullArgument, "out is null");
        }
        *out = HandySummary {
            requests: r.requests,
            local_hits: r.local_hits,
            remote_hits: r.remote_hits,
            failures: r.failures,
            hit_ratio: r.hit_ratio,
            latency_mean: r.latency_mean,
            energy_total: r.energy_total,
            energy_mean: r.energy_mean,
        };
        HandyStatus::Ok
    })
}

/// The report as one CSV record, optionally preceded by the header line.
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn handy_report_csv(r: *const HandyReport, header: bool, out: *mut *mut c_char) -> HandyStatus {
    guard(|| {
        let r = &handle!(r).0;
        let mut s = String::new();
        if header {
            s.push_str(&r.csv_header().join(","));
            s.push('\n');
        }
        s.push_str(&r.csv_record().join(","));
        s.push('\n');
        out_string(s, out)
    })
}

// ---- mining ----

/// An empty request log keeping `capacity` sessions split at gaps of `zeta` s.
#[no_mangle]
pub extern "C" fn handy_log_new(capacity: usize, zeta: f64) -> *mut HandyLog {
    Box::into_raw(Box::new(HandyLog(LogDatabase::new(capacity.max(1), zeta))))
}

/// # Safety
/// `log` must come from `handy_log_new` or be null.
#[no_mangle]
pub unsafe extern "C" fn handy_log_free(log: *mut HandyLog) {
    if !log.is_null() {
        drop(Box::from_raw(log));
    }
}

/// # Safety
/// `log` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn handy_log_request(log: *mut HandyLog, service: u32, time: f64) -> HandyStatus {
    guard(|| {
        let Some(l) = log.as_mut() else {
            return fail(HandyStatus::NullArgument, "log is null");
        };
        l.0.log_request(ServiceId(service), time);
        HandyStatus::Ok
    })
}

/// # Safety
/// `log` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn handy_log_sessions(log: *const HandyLog) -> usize {
    log.as_ref().map_or(0, |l| l.0.len())
}

/// Mines the log's sessions with FP-Growth.
///
/// # Safety
/// `log` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn handy_mine(log: *const HandyLog, min_support: u32, out: *mut *mut HandyMining) -> HandyStatus {
    guard(|| {
        let l = handle!(log);
        if out.is_null() {
            return fail(HandyStatus::NullArgument, "out is null");
        }
        match mine_fp_growth(&l.0, min_support) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(HandyMining(m)));
                HandyStatus::Ok
            }
            Err(e) => fail(HandyStatus::MiningFailed, e.to_string()),
        }
    })
}

/// # Safety
/// `m` must come from `handy_mine` or be null.
#[no_mangle]
pub unsafe extern "C" fn handy_mining_free(m: *mut HandyMining) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of frequent itemsets.
///
/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn handy_mining_itemsets(m: *const HandyMining) -> usize {
    m.as_ref().map_or(0, |m| m.0.frequent_itemsets().len())
}

/// Support of the itemset `items[0..len]`; `NotFound` if it is not frequent.
///
/// # Safety
/// `m` must be a live handle, `items` readable for `len` values, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn handy_mining_support(
    m: *const HandyMining,
    items: *const u32,
    len: usize,
    out: *mut u32,
) -> HandyStatus {
    guard(|| {
        let m = handle!(m);
        if (items.is_null() && len > 0) || out.is_null() {
            return fail(HandyStatus::NullArgument, "items or out is null");
        }
        let raw = if len == 0 { &[][..] } else { std::slice::from_raw_parts(items, len) };
        let mut set: Vec<ServiceId> = raw.iter().map(|&s| ServiceId(s)).collect();
        set.sort_unstable();
        set.dedup();
        match m.0.support(&set) {
            Some(s) => {
                *out = s;
                HandyStatus::Ok
            }
            None => fail(HandyStatus::NotFound, "itemset is not frequent"),
        }
    })
}

/// Correlation score between two services, 0 when unknown.
///
/// # Safety
/// `m` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn handy_mining_correlation(m: *const HandyMining, a: u32, b: u32) -> f64 {
    m.as_ref().map_or(0.0, |m| m.0.correlation(ServiceId(a), ServiceId(b)))
}
