use std::ffi::{c_void, CStr, CString};
use std::process::Command;
use std::ptr;

use agitb_ffi::*;

fn config(trials: u64) -> AgitbConfig {
    let mut c = unsafe { std::mem::zeroed::<AgitbConfig>() };
    assert_eq!(unsafe { agitb_config_default(&mut c) }, AGITB_OK);
    c.simulated_infinity = trials;
    c.skip_timing = true;
    c.master_seed = 3;
    c
}

fn last_error() -> String {
    let p = agitb_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn run(factory: *const AgitbFactory, c: &AgitbConfig) -> (i32, *mut AgitbReport) {
    let mut report = ptr::null_mut();
    let status = unsafe { agitb_run_all(factory, c, &mut report) };
    (status, report)
}

fn verdicts(report: *const AgitbReport) -> Vec<i32> {
    (1..=12)
        .map(|id| unsafe { agitb_report_test_passed(report, id) })
        .collect()
}

#[test]
fn defaults() {
    let mut c = unsafe { std::mem::zeroed::<AgitbConfig>() };
    assert_eq!(unsafe { agitb_config_default(&mut c) }, AGITB_OK);
    assert_eq!(
        (c.input_size, c.pattern_period, c.runs_per_trial, c.rho),
        (10, 7, 20, 10)
    );
    assert!(!c.smoke);
    assert_eq!(
        unsafe { agitb_config_default(ptr::null_mut()) },
        AGITB_NULL_POINTER
    );
}

#[test]
fn fixture_run_and_report() {
    let name = CString::new("memoriser_bounded").unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(
        unsafe { agitb_factory_fixture(name.as_ptr(), 10, &mut f) },
        AGITB_OK
    );
    let (status, report) = run(f, &config(20));
    assert_eq!(status, AGITB_AXIOM_FAILED);
    assert!(!unsafe { agitb_report_passed(report) });
    let v = verdicts(report);
    assert_eq!(v[0], 1);
    assert_eq!(v[4], 0);
    assert_eq!(v[11], 0);
    assert_eq!(unsafe { agitb_report_test_passed(report, 13) }, -1);
    assert_eq!(unsafe { agitb_report_test_passed(ptr::null(), 1) }, -1);

    let json = unsafe { agitb_report_to_json(report) };
    let text = unsafe { CStr::from_ptr(json) }
        .to_str()
        .unwrap()
        .to_string();
    let parsed = agitb::Report::from_json(&text).unwrap();
    assert_eq!(parsed.config.master_seed, 3);
    assert_eq!(parsed.config.simulated_infinity, 20);
    unsafe {
        agitb_string_free(json);
        agitb_report_free(report);
        agitb_factory_free(f);
    }
}

#[test]
fn bad_arguments() {
    let name = CString::new("no_such_model").unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(
        unsafe { agitb_factory_fixture(name.as_ptr(), 10, &mut f) },
        AGITB_USAGE
    );
    assert!(last_error().contains("no_such_model"));
    assert!(f.is_null());
    let echo = CString::new("echo").unwrap();
    assert_eq!(
        unsafe { agitb_factory_fixture(echo.as_ptr(), 0, &mut f) },
        AGITB_USAGE
    );
    assert_eq!(
        unsafe { agitb_factory_fixture(ptr::null(), 10, &mut f) },
        AGITB_NULL_POINTER
    );

    assert_eq!(
        unsafe { agitb_factory_fixture(echo.as_ptr(), 10, &mut f) },
        AGITB_OK
    );
    let mut c = config(5);
    c.pattern_period = 1;
    let (status, report) = run(f, &c);
    assert_eq!(status, AGITB_USAGE);
    assert!(report.is_null());
    let (status, _) = run(ptr::null(), &c);
    assert_eq!(status, AGITB_NULL_POINTER);
    unsafe { agitb_factory_free(f) };
    unsafe { agitb_factory_free(ptr::null_mut()) };
}

#[test]
fn counts() {
    let s = agitb_count_admissible(10, 7, false);
    assert_eq!(
        unsafe { CStr::from_ptr(s) }.to_str().unwrap(),
        "2064377754059776"
    );
    unsafe { agitb_string_free(s) };
    let s = agitb_count_admissible(10, 7, true);
    assert_eq!(
        unsafe { CStr::from_ptr(s) }.to_str().unwrap(),
        "420707233300201"
    );
    unsafe { agitb_string_free(s) };
    assert!(agitb_count_admissible(0, 7, true).is_null());
}

// A step counter implemented through the callback table.

unsafe extern "C" fn counter_new(_: *mut c_void) -> *mut c_void {
    Box::into_raw(Box::new(0u64)).cast()
}

unsafe extern "C" fn counter_predict(_: *const c_void) -> u64 {
    0
}

unsafe extern "C" fn counter_update(state: *mut c_void, _: u64) {
    *state.cast::<u64>() += 1;
}

unsafe extern "C" fn counter_fingerprint(state: *const c_void, out: *mut u8) -> bool {
    let digest = agitb::Fingerprint::digest(&(*state.cast::<u64>()).to_le_bytes());
    ptr::copy_nonoverlapping(digest.0.as_ptr(), out, 32);
    true
}

unsafe extern "C" fn counter_clone(state: *const c_void) -> *mut c_void {
    Box::into_raw(Box::new(*state.cast::<u64>())).cast()
}

unsafe extern "C" fn counter_destroy(state: *mut c_void) {
    drop(Box::from_raw(state.cast::<u64>()));
}

fn counter_vtable() -> AgitbModelVTable {
    AgitbModelVTable {
        new_blank: Some(counter_new),
        predict: Some(counter_predict),
        update: Some(counter_update),
        fingerprint: Some(counter_fingerprint),
        clone: Some(counter_clone),
        destroy: Some(counter_destroy),
    }
}

fn callback_factory(vt: &AgitbModelVTable) -> (i32, *mut AgitbFactory) {
    let desc = CString::new("ffi counter").unwrap();
    let mut f = ptr::null_mut();
    let status =
        unsafe { agitb_factory_from_callbacks(vt, ptr::null_mut(), desc.as_ptr(), 10, &mut f) };
    (status, f)
}

#[test]
fn callback_model_matches_builtin_counter() {
    let (status, foreign) = callback_factory(&counter_vtable());
    assert_eq!(status, AGITB_OK);
    let name = CString::new("counter").unwrap();
    let mut builtin = ptr::null_mut();
    assert_eq!(
        unsafe { agitb_factory_fixture(name.as_ptr(), 10, &mut builtin) },
        AGITB_OK
    );

    let c = config(30);
    let (s1, r1) = run(foreign, &c);
    let (s2, r2) = run(builtin, &c);
    assert_eq!((s1, s2), (AGITB_AXIOM_FAILED, AGITB_AXIOM_FAILED));
    assert_eq!(verdicts(r1), verdicts(r2));
    assert_eq!(verdicts(r1)[2], 1);
    assert_eq!(verdicts(r1)[3], 0);
    unsafe {
        agitb_report_free(r1);
        agitb_report_free(r2);
        agitb_factory_free(foreign);
        agitb_factory_free(builtin);
    }
}

#[test]
fn missing_capabilities() {
    let mut vt = counter_vtable();
    vt.fingerprint = None;
    let (status, f) = callback_factory(&vt);
    assert_eq!(status, AGITB_OK);
    let (status, report) = run(f, &config(5));
    assert_eq!(status, AGITB_INCOMPATIBLE);
    assert!(report.is_null());
    assert!(last_error().contains("fingerprint"));
    unsafe { agitb_factory_free(f) };

    let mut vt = counter_vtable();
    vt.update = None;
    let (status, f) = callback_factory(&vt);
    assert_eq!(status, AGITB_NULL_POINTER);
    assert!(f.is_null());
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use_header.c");
    std::fs::write(
        &src,
        "#include \"agitb.h\"\nint main(void) {\n  AgitbConfig c;\n  AgitbModelVTable vt = {0};\n  (void)vt;\n  return agitb_config_default(&c) == AGITB_OK ? 0 : 1;\n}\n",
    )
    .unwrap();
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let out = Command::new(compiler)
            .args([
                "-fsyntax-only",
                "-Wall",
                "-Werror",
                "-x",
                lang,
                "-I",
                include,
            ])
            .arg(&src)
            .output()
            .expect("C compiler available");
        assert!(
            out.status.success(),
            "{compiler}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
