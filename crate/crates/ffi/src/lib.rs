//! C ABI for the agitb harness.
//!
//! Handles are opaque pointers owned by the caller and released with the
//! matching `*_free` function. Every fallible call returns a status code;
//! on error, `agitb_last_error_message` describes the most recent failure
//! on the calling thread.
//!
//! Inputs cross the boundary as `uint64_t` with channel `i` in bit `i`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use agitb::model::{Fingerprint, Model, ModelFactory};
use agitb::registry::resolve_model;
use agitb::signals::{count_admissible, Input, MAX_WIDTH};
use agitb::{run_all_with_threads, HarnessError, Mode, Report, TestConfig};

pub const AGITB_OK: i32 = 0;
/// The run completed and at least one axiom test did not pass.
pub const AGITB_AXIOM_FAILED: i32 = 1;
pub const AGITB_USAGE: i32 = 2;
/// The model lacks a capability the harness needs (fingerprint or clone).
pub const AGITB_INCOMPATIBLE: i32 = 3;
pub const AGITB_NULL_POINTER: i32 = 4;
pub const AGITB_PANIC: i32 = 5;

/// Run parameters. Fields not listed keep their defaults.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct AgitbConfig {
    pub input_size: u32,
    pub pattern_period: u32,
    /// Zero selects the value implied by `smoke`.
    pub simulated_infinity: u64,
    pub runs_per_trial: u32,
    pub rho: u32,
    pub master_seed: u64,
    pub smoke: bool,
    pub early_exit: bool,
    pub skip_timing: bool,
    /// Worker threads; zero uses all cores.
    pub threads: u32,
}

/// Callbacks implementing a model. `new_blank` may be called from several
/// threads at once, and distinct states may be driven concurrently; one
/// state is only ever used by one thread at a time.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct AgitbModelVTable {
    /// Fresh uninformed state. Must not return null.
    pub new_blank: Option<unsafe extern "C" fn(user_data: *mut c_void) -> *mut c_void>,
    pub predict: Option<unsafe extern "C" fn(state: *const c_void) -> u64>,
    pub update: Option<unsafe extern "C" fn(state: *mut c_void, input: u64)>,
    /// Writes 32 bytes to `out`. Returns false when unsupported.
    pub fingerprint: Option<unsafe extern "C" fn(state: *const c_void, out: *mut u8) -> bool>,
    /// Independent copy, or null when unsupported.
    pub clone: Option<unsafe extern "C" fn(state: *const c_void) -> *mut c_void>,
    pub destroy: Option<unsafe extern "C" fn(state: *mut c_void)>,
}

/// Opaque model factory.
pub struct AgitbFactory {
    inner: Box<dyn ModelFactory>,
}

/// Opaque run report.
pub struct AgitbReport {
    inner: Report,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &HarnessError) -> i32 {
    set_error(e.to_string());
    match e {
        HarnessError::Usage(_) => AGITB_USAGE,
        HarnessError::Incompatible(_) => AGITB_INCOMPATIBLE,
    }
}

/// Runs `f`, turning panics into `AGITB_PANIC`.
fn guard(f: impl FnOnce() -> i32) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            AGITB_PANIC
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, i32> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(AGITB_NULL_POINTER);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        AGITB_USAGE
    })
}

fn width_arg(bits: u32) -> Result<usize, i32> {
    let w = bits as usize;
    if w == 0 || w > MAX_WIDTH {
        set_error(format!("input width must be in 1..={MAX_WIDTH}"));
        return Err(AGITB_USAGE);
    }
    Ok(w)
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn agitb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Fills `out` with the full-scale defaults.
#[no_mangle]
pub unsafe extern "C" fn agitb_config_default(out: *mut AgitbConfig) -> i32 {
    if out.is_null() {
        set_error("config pointer is null");
        return AGITB_NULL_POINTER;
    }
    let d = TestConfig::default();
    *out = AgitbConfig {
        input_size: d.input_size as u32,
        pattern_period: d.pattern_period as u32,
        simulated_infinity: 0,
        runs_per_trial: d.runs_per_trial as u32,
        rho: d.rho as u32,
        master_seed: d.master_seed,
        smoke: false,
        early_exit: d.early_exit,
        skip_timing: d.skip_timing,
        threads: 0,
    };
    AGITB_OK
}

fn to_config(c: &AgitbConfig) -> TestConfig {
    let mode = if c.smoke { Mode::Smoke } else { Mode::Full };
    let mut t = TestConfig {
        input_size: c.input_size as usize,
        pattern_period: c.pattern_period as usize,
        runs_per_trial: c.runs_per_trial as usize,
        rho: c.rho as usize,
        early_exit: c.early_exit,
        skip_timing: c.skip_timing,
        ..TestConfig::default()
    }
    .with_mode(mode)
    .with_seed(c.master_seed);
    if c.simulated_infinity > 0 {
        t = t.with_trials(c.simulated_infinity);
    }
    t
}

/// Built-in fixture (e.g. `"memoriser_bounded"`) or registered model by
/// name.
#[no_mangle]
pub unsafe extern "C" fn agitb_factory_fixture(
    name: *const c_char,
    input_bits: u32,
    out: *mut *mut AgitbFactory,
) -> i32 {
    guard(|| {
        if out.is_null() {
            set_error("output pointer is null");
            return AGITB_NULL_POINTER;
        }
        let name = match str_arg(name, "name") {
            Ok(n) => n,
            Err(code) => return code,
        };
        let width = match width_arg(input_bits) {
            Ok(w) => w,
            Err(code) => return code,
        };
        match resolve_model(name, width) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(AgitbFactory { inner }));
                AGITB_OK
            }
            Err(e) => status_of(&e),
        }
    })
}

struct Callbacks {
    vt: AgitbModelVTable,
    user_data: *mut c_void,
    descriptor: String,
    width: usize,
}

// The caller promises the callbacks tolerate the concurrency described on
// `AgitbModelVTable`.
unsafe impl Send for Callbacks {}
unsafe impl Sync for Callbacks {}

struct ForeignFactory(Arc<Callbacks>);

struct ForeignModel {
    cb: Arc<Callbacks>,
    state: *mut c_void,
}

unsafe impl Send for ForeignModel {}

impl Drop for ForeignModel {
    fn drop(&mut self) {
        if let Some(destroy) = self.cb.vt.destroy {
            unsafe { destroy(self.state) };
        }
    }
}

impl Model for ForeignModel {
    fn input_size(&self) -> usize {
        self.cb.width
    }

    fn predict(&self) -> Input {
        let bits = unsafe { self.cb.vt.predict.expect("checked at construction")(self.state) };
        let mask = if self.cb.width == 64 {
            u64::MAX
        } else {
            (1u64 << self.cb.width) - 1
        };
        Input::new(bits & mask, self.cb.width).expect("masked to width")
    }

    fn update(&mut self, input: &Input) {
        unsafe { self.cb.vt.update.expect("checked at construction")(self.state, input.bits()) }
    }

    fn fingerprint(&self) -> Option<Fingerprint> {
        let f = self.cb.vt.fingerprint?;
        let mut out = [0u8; 32];
        unsafe { f(self.state, out.as_mut_ptr()) }.then_some(Fingerprint(out))
    }

    fn clone_model(&self) -> Option<Box<dyn Model>> {
        let c = self.cb.vt.clone?;
        let state = unsafe { c(self.state) };
        if state.is_null() {
            return None;
        }
        Some(Box::new(ForeignModel {
            cb: Arc::clone(&self.cb),
            state,
        }))
    }
}

impl ModelFactory for ForeignFactory {
    fn blank(&self) -> Box<dyn Model> {
        let state =
            unsafe { self.0.vt.new_blank.expect("checked at construction")(self.0.user_data) };
        assert!(!state.is_null(), "new_blank returned null");
        Box::new(ForeignModel {
            cb: Arc::clone(&self.0),
            state,
        })
    }

    fn descriptor(&self) -> String {
        self.0.descriptor.clone()
    }

    fn input_size(&self) -> usize {
        self.0.width
    }
}

/// Factory over caller-supplied callbacks. `new_blank`, `predict`,
/// `update` and `destroy` are required; `fingerprint` and `clone` may be
/// null, in which case runs fail with `AGITB_INCOMPATIBLE`. `user_data`
/// must outlive the factory.
#[no_mangle]
pub unsafe extern "C" fn agitb_factory_from_callbacks(
    vtable: *const AgitbModelVTable,
    user_data: *mut c_void,
    descriptor: *const c_char,
    input_bits: u32,
    out: *mut *mut AgitbFactory,
) -> i32 {
    guard(|| {
        if vtable.is_null() || out.is_null() {
            set_error("vtable or output pointer is null");
            return AGITB_NULL_POINTER;
        }
        let vt = *vtable;
        if vt.new_blank.is_none()
            || vt.predict.is_none()
            || vt.update.is_none()
            || vt.destroy.is_none()
        {
            set_error("new_blank, predict, update and destroy are required");
            return AGITB_NULL_POINTER;
        }
        let descriptor = match str_arg(descriptor, "descriptor") {
            Ok(d) => d.to_string(),
            Err(code) => return code,
        };
        let width = match width_arg(input_bits) {
            Ok(w) => w,
            Err(code) => return code,
        };
        let cb = Callbacks {
            vt,
            user_data,
            descriptor,
            width,
        };
        *out = Box::into_raw(Box::new(AgitbFactory {
            inner: Box::new(ForeignFactory(Arc::new(cb))),
        }));
        AGITB_OK
    })
}

#[no_mangle]
pub unsafe extern "C" fn agitb_factory_free(factory: *mut AgitbFactory) {
    if !factory.is_null() {
        drop(Box::from_raw(factory));
    }
}

/// Runs all twelve tests. On `AGITB_OK` or `AGITB_AXIOM_FAILED` a report is
/// stored in `out`; on any other status `out` is left untouched.
#[no_mangle]
pub unsafe extern "C" fn agitb_run_all(
    factory: *const AgitbFactory,
    config: *const AgitbConfig,
    out: *mut *mut AgitbReport,
) -> i32 {
    guard(|| {
        if factory.is_null() || config.is_null() || out.is_null() {
            set_error("factory, config or output pointer is null");
            return AGITB_NULL_POINTER;
        }
        let c = &*config;
        let threads = (c.threads > 0).then_some(c.threads as usize);
        match run_all_with_threads((*factory).inner.as_ref(), &to_config(c), threads) {
            Ok(report) => {
                let code = if report.passed {
                    AGITB_OK
                } else {
                    AGITB_AXIOM_FAILED
                };
                *out = Box::into_raw(Box::new(AgitbReport { inner: report }));
                code
            }
            Err(e) => status_of(&e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn agitb_report_passed(report: *const AgitbReport) -> bool {
    !report.is_null() && (*report).inner.passed
}

/// 1 if test `axiom_id` passed, 0 if it failed or was skipped, -1 if the
/// report is null or has no such test.
#[no_mangle]
pub unsafe extern "C" fn agitb_report_test_passed(
    report: *const AgitbReport,
    axiom_id: u32,
) -> i32 {
    if report.is_null() {
        return -1;
    }
    match u8::try_from(axiom_id)
        .ok()
        .and_then(|id| (*report).inner.test(id))
    {
        Some(t) => i32::from(t.passed),
        None => -1,
    }
}

/// JSON text of the report; release with `agitb_string_free`.
#[no_mangle]
pub unsafe extern "C" fn agitb_report_to_json(report: *const AgitbReport) -> *mut c_char {
    if report.is_null() {
        set_error("report is null");
        return ptr::null_mut();
    }
    CString::new((*report).inner.to_json()).map_or(ptr::null_mut(), CString::into_raw)
}

#[no_mangle]
pub unsafe extern "C" fn agitb_report_free(report: *mut AgitbReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

#[no_mangle]
pub unsafe extern "C" fn agitb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of admissible sequences as a decimal string, or null on invalid
/// arguments. Release with `agitb_string_free`.
#[no_mangle]
pub extern "C" fn agitb_count_admissible(
    input_bits: u32,
    length: u32,
    cyclic: bool,
) -> *mut c_char {
    match count_admissible(input_bits as usize, length as usize, cyclic) {
        Ok(n) => CString::new(n.to_string()).map_or(ptr::null_mut(), CString::into_raw),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}
