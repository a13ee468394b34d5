//! C ABI over `nlpot-core`.
//!
//! Every function returns an [`NlpotStatus`] and writes results through out
//! pointers. On failure the message is kept per thread and can be read with
//! [`nlpot_last_error_message`]. Models are opaque handles created by
//! [`nlpot_model_from_json`] and released with [`nlpot_model_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nlpot::capacity::{
    dyadic_upper, exact_radial, integral_estimate, variational_radial, CapacityQuery, VariationalOptions,
};
use nlpot::classify::{classify, Question, Verdict, VerdictState};
use nlpot::exponents::{analytic_exponents, critical_exponents};
use nlpot::green::{normalized_green_value, radial_green_gradient, radial_green_value};
use nlpot::measures::{AssumptionProfile, Model, ModelSpec, RadialMeasure};
use nlpot::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlpotStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    SpecError = 3,
    DomainError = 4,
    InvalidInput = 5,
    UnsupportedAsymptotics = 6,
    QuadratureFailure = 7,
    SolverDivergence = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlpotCapacityMethod {
    IntegralEstimate = 0,
    ExactRadial = 1,
    DyadicUpper = 2,
    Variational = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlpotQuestion {
    SingletonZero = 0,
    IsParabolic = 1,
    GreenBounded = 2,
    GreenInLtau = 3,
    GradientInLt = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlpotVerdictState {
    Member = 0,
    NonMember = 1,
    BorderlineIn = 2,
    BorderlineOut = 3,
    Inconclusive = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NlpotCapacityResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    /// False when the estimate was used outside its comparability range.
    pub hypothesis_ok: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NlpotExponents {
    pub ls0: f64,
    pub us0: f64,
    pub lq0: f64,
    pub uq0: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NlpotCriticalExponents {
    /// `INFINITY` at `p = us0`, `NAN` when `p > us0`.
    pub tau_p: f64,
    pub t_p: f64,
    pub q_hat: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlpotVerdict {
    pub state: NlpotVerdictState,
    /// `NAN` when the question has no critical exponent.
    pub critical_exponent: f64,
}

/// Opaque model handle.
pub struct NlpotModel {
    inner: Model,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(NlpotStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Domain(_) => NlpotStatus::DomainError,
            Error::Invalid(_) => NlpotStatus::InvalidInput,
            Error::UnsupportedAsymptotics(_) => NlpotStatus::UnsupportedAsymptotics,
            Error::Quadrature(_) => NlpotStatus::QuadratureFailure,
            Error::SolverDivergence(_) => NlpotStatus::SolverDivergence,
            Error::Spec(_) => NlpotStatus::SpecError,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(NlpotStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, clearing the error slot first and recording any failure or panic.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NlpotStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NlpotStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {msg}"));
            NlpotStatus::Panic
        }
    }
}

unsafe fn model_ref<'a>(model: *const NlpotModel) -> Result<&'a Model, Failure> {
    model.as_ref().map(|m| &m.inner).ok_or_else(|| null("model"))
}

unsafe fn radial<'a>(model: *const NlpotModel) -> Result<&'a RadialMeasure, Failure> {
    model_ref(model)?
        .radial
        .as_ref()
        .ok_or_else(|| Failure(NlpotStatus::UnsupportedAsymptotics, "operation needs a radial weight model".into()))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a>(ptr: *const f64, len: usize) -> Result<&'a [f64], Failure> {
    if len == 0 {
        Ok(&[])
    } else if ptr.is_null() {
        Err(null("exponent array"))
    } else {
        Ok(std::slice::from_raw_parts(ptr, len))
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next `nlpot_*` call on the same thread.
#[no_mangle]
pub extern "C" fn nlpot_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nlpot_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a JSON model spec such as `{"kind":"log","n":3,"s":3,"beta":1}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nlpot_model_from_json(json: *const c_char, out: *mut *mut NlpotModel) -> NlpotStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| Failure(NlpotStatus::InvalidUtf8, e.to_string()))?;
        let inner = ModelSpec::from_json(text)?.build()?;
        out.write(Box::into_raw(Box::new(NlpotModel { inner })));
        Ok(())
    })
}

/// Releases a model; null is ignored.
///
/// # Safety
/// `model` must come from [`nlpot_model_from_json`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn nlpot_model_free(model: *mut NlpotModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Volume growth `μ(B_ρ)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nlpot_model_growth(model: *const NlpotModel, rho: f64, out: *mut f64) -> NlpotStatus {
    guard(|| {
        let v = model_ref(model)?.growth.evaluate(rho)?;
        write(out, v)
    })
}

/// Capacity of the annulus `r < |x| < big_r`. The exact and variational
/// methods need a radial weight model; the variational grid has `grid` nodes.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nlpot_capacity(
    model: *const NlpotModel,
    method: NlpotCapacityMethod,
    p: f64,
    r: f64,
    big_r: f64,
    grid: usize,
    out: *mut NlpotCapacityResult,
) -> NlpotStatus {
    guard(|| {
        let m = model_ref(model)?;
        let q = CapacityQuery::new(p, r, big_r)?;
        let res = match method {
            NlpotCapacityMethod::IntegralEstimate => integral_estimate(&m.growth, &q)?,
            NlpotCapacityMethod::DyadicUpper => dyadic_upper(&m.growth, &q)?,
            NlpotCapacityMethod::ExactRadial => exact_radial(radial(model)?, &q)?,
            NlpotCapacityMethod::Variational => {
                variational_radial(radial(model)?, &q, &VariationalOptions::with_n(grid))?.result
            }
        };
        write(
            out,
            NlpotCapacityResult {
                value: res.value,
                abs_error_estimate: res.abs_error_estimate,
                hypothesis_ok: res.hypothesis_ok,
            },
        )
    })
}

/// Pointwise exponent endpoints at the origin.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nlpot_exponents(model: *const NlpotModel, out: *mut NlpotExponents) -> NlpotStatus {
    guard(|| {
        let r = analytic_exponents(&model_ref(model)?.growth)?;
        write(out, NlpotExponents { ls0: r.ls0, us0: r.us0, lq0: r.lq0, uq0: r.uq0 })
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nlpot_critical_exponents(
    model: *const NlpotModel,
    p: f64,
    out: *mut NlpotCriticalExponents,
) -> NlpotStatus {
    guard(|| {
        let c = critical_exponents(&analytic_exponents(&model_ref(model)?.growth)?, p)?;
        write(out, NlpotCriticalExponents { tau_p: c.tau_p.unwrap_or(f64::NAN), t_p: c.t_p, q_hat: c.q_hat })
    })
}

/// Radial Green profile `u(ρ)` on the unit ball; `normalized` scales it so
/// that `{u ≥ b}` has capacity `b^{1-p}`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nlpot_green_value(
    model: *const NlpotModel,
    p: f64,
    rho: f64,
    normalized: bool,
    out: *mut f64,
) -> NlpotStatus {
    guard(|| {
        let m = radial(model)?;
        let v = if normalized { normalized_green_value(m, p, rho)? } else { radial_green_value(m, p, rho)? };
        write(out, v)
    })
}

/// `|∇u|(ρ)` for the unnormalized profile.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nlpot_green_gradient(
    model: *const NlpotModel,
    p: f64,
    rho: f64,
    out: *mut f64,
) -> NlpotStatus {
    guard(|| write(out, radial_green_gradient(radial(model)?, p, rho)?))
}

#[allow(clippy::too_many_arguments)]
unsafe fn run_classify(
    model: *const NlpotModel,
    question: NlpotQuestion,
    p: f64,
    exponent: f64,
    poincare: *const f64,
    poincare_len: usize,
    poincare_large: *const f64,
    poincare_large_len: usize,
) -> Result<Verdict, Failure> {
    let question = match question {
        NlpotQuestion::SingletonZero => Question::SingletonZero,
        NlpotQuestion::IsParabolic => Question::IsParabolic,
        NlpotQuestion::GreenBounded => Question::GreenBounded,
        NlpotQuestion::GreenInLtau => Question::GreenInLtau,
        NlpotQuestion::GradientInLt => Question::GradientInLt,
    };
    let hyp = AssumptionProfile {
        poincare_at_x0: slice(poincare, poincare_len)?.to_vec(),
        poincare_large_radii: slice(poincare_large, poincare_large_len)?.to_vec(),
        ..AssumptionProfile::default()
    };
    hyp.validate()?;
    let exponent = (!exponent.is_nan()).then_some(exponent);
    Ok(classify(question, &model_ref(model)?.growth, p, exponent, &hyp)?)
}

/// Answers one classification question. `exponent` is τ or t for the
/// integrability questions (`INFINITY` allowed for τ) and `NAN` otherwise.
/// The two arrays list declared Poincaré exponents at the origin and for
/// large radii; either may be null when its length is 0.
///
/// # Safety
/// Pointers must be valid and the arrays must hold the stated lengths.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn nlpot_classify(
    model: *const NlpotModel,
    question: NlpotQuestion,
    p: f64,
    exponent: f64,
    poincare: *const f64,
    poincare_len: usize,
    poincare_large: *const f64,
    poincare_large_len: usize,
    out: *mut NlpotVerdict,
) -> NlpotStatus {
    guard(|| {
        let v = run_classify(model, question, p, exponent, poincare, poincare_len, poincare_large, poincare_large_len)?;
        let state = match v.state {
            VerdictState::Member => NlpotVerdictState::Member,
            VerdictState::NonMember => NlpotVerdictState::NonMember,
            VerdictState::BorderlineIn => NlpotVerdictState::BorderlineIn,
            VerdictState::BorderlineOut => NlpotVerdictState::BorderlineOut,
            VerdictState::Inconclusive => NlpotVerdictState::Inconclusive,
        };
        write(out, NlpotVerdict { state, critical_exponent: v.critical_exponent.unwrap_or(f64::NAN) })
    })
}

/// Same as [`nlpot_classify`] but returns the full verdict (basis and
/// hypotheses used) as JSON. Free the string with [`nlpot_string_free`].
///
/// # Safety
/// See [`nlpot_classify`].
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn nlpot_classify_json(
    model: *const NlpotModel,
    question: NlpotQuestion,
    p: f64,
    exponent: f64,
    poincare: *const f64,
    poincare_len: usize,
    poincare_large: *const f64,
    poincare_large_len: usize,
    out: *mut *mut c_char,
) -> NlpotStatus {
    guard(|| {
        let v = run_classify(model, question, p, exponent, poincare, poincare_len, poincare_large, poincare_large_len)?;
        let json = serde_json::to_string(&v).map_err(|e| Failure(NlpotStatus::InvalidInput, e.to_string()))?;
        write(out, CString::new(json).unwrap_or_default().into_raw())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn nlpot_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
