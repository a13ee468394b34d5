use std::ffi::{CStr, CString};
use std::ptr;

use nlpot_ffi::*;

fn model(json: &str) -> *mut NlpotModel {
    let json = CString::new(json).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { nlpot_model_from_json(json.as_ptr(), &mut m) }, NlpotStatus::Ok);
    assert!(!m.is_null());
    m
}

fn last_error() -> String {
    let p = nlpot_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn newtonian_capacity_and_green_profile() {
    let m = model(r#"{"kind":"lebesgue","n":3}"#);
    let mut res = NlpotCapacityResult::default();
    let st = unsafe { nlpot_capacity(m, NlpotCapacityMethod::ExactRadial, 2.0, 1.0, 2.0, 0, &mut res) };
    assert_eq!(st, NlpotStatus::Ok);
    assert!((res.value - 8.0 * std::f64::consts::PI).abs() < 1e-9 * res.value);
    assert!(nlpot_last_error_message().is_null());

    let st = unsafe { nlpot_capacity(m, NlpotCapacityMethod::Variational, 2.0, 1.0, 2.0, 1024, &mut res) };
    assert_eq!(st, NlpotStatus::Ok);
    assert!((res.value / (8.0 * std::f64::consts::PI) - 1.0).abs() < 1e-3);

    // u(ρ) = 1/ρ - 1 and |∇u| = 1/ρ² for p = 2 in ℝ³
    let (mut u, mut g) = (0.0, 0.0);
    unsafe {
        assert_eq!(nlpot_green_value(m, 2.0, 0.25, false, &mut u), NlpotStatus::Ok);
        assert_eq!(nlpot_green_gradient(m, 2.0, 0.25, &mut g), NlpotStatus::Ok);
    }
    assert!((u - 3.0).abs() < 1e-10 && (g - 16.0).abs() < 1e-12);

    let mut f = 0.0;
    assert_eq!(unsafe { nlpot_model_growth(m, 1.0, &mut f) }, NlpotStatus::Ok);
    assert!((f - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
    unsafe { nlpot_model_free(m) };
}

#[test]
fn exponents_and_classification() {
    let m = model(r#"{"kind":"log","n":3,"s":3,"beta":1}"#);
    let mut e = NlpotExponents::default();
    assert_eq!(unsafe { nlpot_exponents(m, &mut e) }, NlpotStatus::Ok);
    assert_eq!((e.ls0, e.us0), (3.0, 3.0));

    let mut c = NlpotCriticalExponents::default();
    assert_eq!(unsafe { nlpot_critical_exponents(m, 2.0, &mut c) }, NlpotStatus::Ok);
    assert_eq!((c.tau_p, c.t_p), (3.0, 1.5));
    assert_eq!(unsafe { nlpot_critical_exponents(m, 3.0, &mut c) }, NlpotStatus::Ok);
    assert!(c.tau_p.is_infinite());

    let mut v = NlpotVerdict { state: NlpotVerdictState::Inconclusive, critical_exponent: 0.0 };
    let st = unsafe { nlpot_classify(m, NlpotQuestion::GreenInLtau, 2.0, 3.0, ptr::null(), 0, ptr::null(), 0, &mut v) };
    assert_eq!(st, NlpotStatus::Ok);
    assert_eq!(v.state, NlpotVerdictState::BorderlineIn);

    let poincare = [1.0];
    let st = unsafe {
        nlpot_classify(m, NlpotQuestion::SingletonZero, 2.0, f64::NAN, poincare.as_ptr(), 1, ptr::null(), 0, &mut v)
    };
    assert_eq!(st, NlpotStatus::Ok);
    assert_eq!(v.state, NlpotVerdictState::Member);

    let mut json = ptr::null_mut();
    let st = unsafe {
        nlpot_classify_json(m, NlpotQuestion::GradientInLt, 2.0, 1.5, ptr::null(), 0, ptr::null(), 0, &mut json)
    };
    assert_eq!(st, NlpotStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { nlpot_string_free(json) };
    assert!(text.contains("\"state\":\"non-member\""), "{text}");
    unsafe { nlpot_model_free(m) };
}

#[test]
fn error_codes_and_messages() {
    let mut m = ptr::null_mut();
    let bad = CString::new(r#"{"kind":"nope"}"#).unwrap();
    assert_eq!(unsafe { nlpot_model_from_json(bad.as_ptr(), &mut m) }, NlpotStatus::SpecError);
    assert!(last_error().contains("nope"));
    assert!(m.is_null());

    let invalid_utf8 = [0xffu8, 0];
    assert_eq!(unsafe { nlpot_model_from_json(invalid_utf8.as_ptr().cast(), &mut m) }, NlpotStatus::InvalidUtf8);
    assert_eq!(unsafe { nlpot_model_from_json(ptr::null(), &mut m) }, NlpotStatus::NullPointer);

    let out_of_domain = CString::new(r#"{"kind":"power","n":3,"alpha":5}"#).unwrap();
    assert_eq!(unsafe { nlpot_model_from_json(out_of_domain.as_ptr(), &mut m) }, NlpotStatus::DomainError);

    let ahlfors = model(r#"{"kind":"ahlfors","q":2.5}"#);
    let mut x = 0.0;
    assert_eq!(unsafe { nlpot_green_value(ahlfors, 2.0, 0.5, false, &mut x) }, NlpotStatus::UnsupportedAsymptotics);
    let mut res = NlpotCapacityResult::default();
    assert_eq!(
        unsafe { nlpot_capacity(ahlfors, NlpotCapacityMethod::IntegralEstimate, 0.5, 1.0, 2.0, 0, &mut res) },
        NlpotStatus::DomainError
    );
    assert_eq!(
        unsafe { nlpot_capacity(ahlfors, NlpotCapacityMethod::IntegralEstimate, 2.0, 1.0, 2.0, 0, ptr::null_mut()) },
        NlpotStatus::NullPointer
    );
    assert_eq!(unsafe { nlpot_model_growth(ptr::null(), 1.0, &mut x) }, NlpotStatus::NullPointer);
    unsafe {
        nlpot_model_free(ahlfors);
        nlpot_model_free(ptr::null_mut());
        nlpot_string_free(ptr::null_mut());
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(nlpot_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/nlpot.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["nlpot_model_from_json", "nlpot_capacity", "nlpot_classify", "nlpot_last_error_message"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("check.c");
    std::fs::write(&src, format!("#include \"{header}\"\nint main(void) {{ return NLPOT_STATUS_OK; }}\n")).unwrap();
    match std::process::Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"]).arg(&src).output() {
        Ok(out) => assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr)),
        Err(_) => eprintln!("no C compiler found; skipping the compile check"),
    }
}
