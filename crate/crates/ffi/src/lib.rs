//! C ABI for `poisson-american`.
//!
//! Handles are opaque pointers created by `pa_*_new` and released with the
//! matching `pa_*_free`. Every fallible function returns a `PaStatus`; on a
//! non-zero status `pa_last_error_message` describes the failure (per thread,
//! valid until the next call on that thread). Outputs are written only on
//! success. Panics are caught at the boundary and reported as `PA_STATUS_PANIC`.

// `!(a < b)` is used on purpose so NaN inputs fail the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use poisson_american::mc::{self, McConfig, Payoff, Sampling};
use poisson_american::pricer::Pricer;
use poisson_american::{BarrierPair, Error, Jump, LevyModel, OptionKind, PricingProblem, Side};

#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidModel = 3,
    Assumption = 4,
    NoRoot = 5,
    BarrierRegime = 6,
    NotSolved = 7,
    Numerical = 8,
    Panic = 9,
}

#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaSide {
    SpectrallyNegative = 0,
    SpectrallyPositive = 1,
}

#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaOption {
    Put = 0,
    Call = 1,
}

/// Optimal barriers: log-levels, price levels and first-order residuals.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PaBarriers {
    pub l: f64,
    pub u: f64,
    pub lower_price: f64,
    pub upper_price: f64,
    pub residual_h: f64,
    pub residual_j: f64,
    pub residual_j_tilde: f64,
    /// Residual with exponential growth in u - l scaled out, relative to K.
    pub residual_scaled: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PaMcEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_effective: u64,
    pub truncated_fraction: f64,
    pub truncation_bound: f64,
    /// 1 when tilted sampling was used.
    pub tilted: i32,
}

/// Opaque jump-diffusion model.
pub struct PaModel {
    inner: LevyModel,
}

/// Opaque pricing problem with its solved barriers, once solved.
pub struct PaProblem {
    pricer: Pricer,
    barriers: Option<BarrierPair>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PaStatus {
    match e {
        Error::InvalidModel(_) => PaStatus::InvalidModel,
        Error::Assumption(_) => PaStatus::Assumption,
        Error::NoRoot(_) | Error::ScanExhausted(_) => PaStatus::NoRoot,
        Error::BarrierRegime { .. } => PaStatus::BarrierRegime,
        Error::Precondition(_) | Error::DomainError { .. } | Error::Config(_) => PaStatus::InvalidArgument,
        _ => PaStatus::Numerical,
    }
}

struct Fail(PaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(PaStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> PaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            PaStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside poisson-american".into());
            PaStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

/// Message for the last failure on this thread; empty after a success.
#[no_mangle]
pub extern "C" fn pa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pa_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    V.as_ptr()
}

/// Creates a model (`side` a `PaSide` value) from drift `c`, volatility `eta` and `n_jumps` exponential
/// jump classes (rates `alphas`, parameters `betas`; may be null when
/// `n_jumps` is 0).
///
/// # Safety
/// `alphas` and `betas` must point to `n_jumps` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pa_model_new(
    side: i32,
    c: f64,
    eta: f64,
    alphas: *const f64,
    betas: *const f64,
    n_jumps: usize,
    out: *mut *mut PaModel,
) -> PaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let jumps = if n_jumps == 0 {
            Vec::new()
        } else {
            if alphas.is_null() || betas.is_null() {
                return Err(null("jump arrays"));
            }
            let a = std::slice::from_raw_parts(alphas, n_jumps);
            let b = std::slice::from_raw_parts(betas, n_jumps);
            a.iter().zip(b).map(|(&alpha, &beta)| Jump { alpha, beta }).collect()
        };
        let side = match side {
            x if x == PaSide::SpectrallyNegative as i32 => Side::SpectrallyNegative,
            x if x == PaSide::SpectrallyPositive as i32 => Side::SpectrallyPositive,
            x => return Err(Fail(PaStatus::InvalidArgument, format!("unknown side {x}"))),
        };
        let inner = LevyModel::new(side, c, eta, jumps)?;
        write(out, Box::into_raw(Box::new(PaModel { inner })))
    })
}

/// # Safety
/// `model` must come from `pa_model_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pa_model_free(model: *mut PaModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn model_ref<'a>(model: *const PaModel) -> Result<&'a PaModel, Fail> {
    model.as_ref().ok_or_else(|| null("model"))
}

unsafe fn problem_ref<'a>(problem: *const PaProblem) -> Result<&'a PaProblem, Fail> {
    problem.as_ref().ok_or_else(|| null("problem"))
}

/// Laplace exponent of the model's spectrally negative representation.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pa_model_psi(model: *const PaModel, theta: f64, out: *mut f64) -> PaStatus {
    guard(|| write(out, model_ref(model)?.inner.psi(theta)?))
}

/// Largest real root of psi(s) = q.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pa_model_phi(model: *const PaModel, q: f64, out: *mut f64) -> PaStatus {
    guard(|| write(out, model_ref(model)?.inner.phi(q)?))
}

/// Creates a pricing problem (`option` a `PaOption` value); the model is copied. `x_ref` is the call
/// reference log-price, NaN for the default; ignored for puts.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pa_problem_new(
    model: *const PaModel,
    strike: f64,
    r: f64,
    lambda: f64,
    option: i32,
    x_ref: f64,
    out: *mut *mut PaProblem,
) -> PaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = model_ref(model)?.inner.clone();
        let option = match option {
            x if x == PaOption::Put as i32 => OptionKind::Put,
            x if x == PaOption::Call as i32 => OptionKind::Call,
            x => return Err(Fail(PaStatus::InvalidArgument, format!("unknown option kind {x}"))),
        };
        let problem = PricingProblem::new(m, strike, r, lambda, option);
        let pricer = Pricer::new(&problem, (!x_ref.is_nan()).then_some(x_ref))?;
        write(out, Box::into_raw(Box::new(PaProblem { pricer, barriers: None })))
    })
}

/// # Safety
/// `problem` must come from `pa_problem_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pa_problem_free(problem: *mut PaProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Solves for the optimal barriers and keeps them in the handle.
///
/// # Safety
/// Pointers must be valid; `out` may be null.
#[no_mangle]
pub unsafe extern "C" fn pa_problem_solve(problem: *mut PaProblem, out: *mut PaBarriers) -> PaStatus {
    guard(|| {
        let p = problem.as_mut().ok_or_else(|| null("problem"))?;
        let b = p.pricer.solve_barriers()?;
        let summary = PaBarriers {
            l: b.l,
            u: b.u,
            lower_price: b.l.exp(),
            upper_price: b.u.exp(),
            residual_h: b.residual_h,
            residual_j: b.residual_j,
            residual_j_tilde: b.residual_j_tilde,
            residual_scaled: b.residual_scaled,
        };
        p.barriers = Some(b);
        if !out.is_null() {
            out.write(summary);
        }
        Ok(())
    })
}

/// V(s) at the solved barriers; `PA_STATUS_NOT_SOLVED` before `pa_problem_solve`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pa_problem_value(problem: *const PaProblem, s: f64, out: *mut f64) -> PaStatus {
    guard(|| {
        let p = problem_ref(problem)?;
        let b = p.barriers.as_ref().ok_or(Fail(PaStatus::NotSolved, "call pa_problem_solve first".into()))?;
        if !(s > 0.0) {
            return Err(Fail(PaStatus::InvalidArgument, format!("price must be positive, got {s}")));
        }
        write(out, p.pricer.value(b, s)?)
    })
}

/// Value at price s of exercising at the first observation with log-price
/// in [l, u] (puts: l may be -INFINITY; calls: u may be INFINITY).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pa_problem_interval_value(
    problem: *const PaProblem,
    s: f64,
    l: f64,
    u: f64,
    out: *mut f64,
) -> PaStatus {
    guard(|| {
        let p = problem_ref(problem)?;
        if !(s > 0.0) {
            return Err(Fail(PaStatus::InvalidArgument, format!("price must be positive, got {s}")));
        }
        write(out, p.pricer.interval_value(s, l, u)?)
    })
}

/// Monte Carlo estimate of the interval value at price s on the original
/// dynamics. `tilted` = 1 forces likelihood-ratio sampling at Phi(r),
/// 0 forces plain sampling, -1 chooses automatically.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn pa_mc_estimate(
    problem: *const PaProblem,
    s: f64,
    l: f64,
    u: f64,
    n_paths: u64,
    seed: u64,
    max_observations: u64,
    tilted: i32,
    out: *mut PaMcEstimate,
) -> PaStatus {
    guard(|| {
        let p = problem_ref(problem)?;
        if !(s > 0.0) {
            return Err(Fail(PaStatus::InvalidArgument, format!("price must be positive, got {s}")));
        }
        let cfg = McConfig {
            n_paths: n_paths as usize,
            seed,
            max_observations: max_observations as usize,
            antithetic: false,
            sampling: match tilted {
                0 => Sampling::Plain,
                1 => Sampling::Tilted,
                _ => Sampling::Auto,
            },
        };
        let problem = p.pricer.problem();
        let payoff = match problem.option {
            OptionKind::Put => Payoff::Put,
            OptionKind::Call => Payoff::Call,
        };
        let (e, used) = mc::estimate_value(problem, s.ln(), l, u, &cfg, payoff)?;
        write(
            out,
            PaMcEstimate {
                mean: e.mean,
                stderr: e.stderr,
                n_effective: e.n_effective as u64,
                truncated_fraction: e.truncated_fraction,
                truncation_bound: e.truncation_bound,
                tilted: (used == Sampling::Tilted) as i32,
            },
        )
    })
}
