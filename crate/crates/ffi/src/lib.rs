//! C interface to the `adine` optimizers and landscapes.
//!
//! Every fallible function returns an [`AdineStatus`]; on failure the
//! message is available from [`adine_last_error`] on the same thread.
//! Handles are created by `*_new*` functions and released with the matching
//! `*_free`.
//!
//! # Safety
//!
//! Pointer arguments must be null or valid for the stated length, handles
//! must come from this library and not be used after being freed, and a
//! handle must not be used from two threads at once.

#![allow(clippy::missing_safety_doc)]

use std::cell::{Cell, RefCell};
use std::ffi::{c_char, c_int, c_void, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use adine::harness::cli::{run_config_file, RunKind};
use adine::landscape::{sample_cubic, sample_quadratic, Landscape};
use adine::optim::{nesterov_momentum, polyak_optimal_params, wsl_closed_form, wsl_update, NesterovSchedule};
use adine::{AdineConfig, Error, Objective, Optimizer, OptimizerConfig, OptimizerState, ParamVector, Rng};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdineStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NonFinite = 4,
    Diverged = 5,
    Io = 6,
    Parse = 7,
    Callback = 8,
    Panic = 9,
}

impl From<&Error> for AdineStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } => AdineStatus::DimensionMismatch,
            Error::NonFinite { .. } => AdineStatus::NonFinite,
            Error::Diverged { .. } => AdineStatus::Diverged,
            Error::EmptyVector | Error::InvalidArgument(_) | Error::InvalidConfig(_) => AdineStatus::InvalidArgument,
            Error::Io { .. } => AdineStatus::Io,
            Error::Csv { .. } | Error::Parse { .. } | Error::Json { .. } => AdineStatus::Parse,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(AdineStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(AdineStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(AdineStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> AdineStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            AdineStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            AdineStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn slice_mut<'a>(p: *mut f64, n: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, n))
}

fn check_len(expected: usize, got: usize) -> Result<(), Failure> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got }.into());
    }
    Ok(())
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the buffer size needed to hold
/// the whole message; `buf` may be null to query it.
#[no_mangle]
pub unsafe extern "C" fn adine_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn adine_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// A quadratic, cubic or 2-D saddle objective.
pub struct AdineLandscape(Landscape);

unsafe fn new_landscape(
    out_handle: *mut *mut AdineLandscape,
    make: impl FnOnce() -> adine::Result<Landscape>,
) -> AdineStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        *slot = Box::into_raw(Box::new(AdineLandscape(make()?)));
        Ok(())
    })
}

/// `f(x) = Σ λ_i x_i²` with `|λ_i|` drawn from `U[0.99, 1.01]` and alternating signs.
#[no_mangle]
pub unsafe extern "C" fn adine_landscape_new_quadratic(
    n: usize,
    seed: u64,
    out_handle: *mut *mut AdineLandscape,
) -> AdineStatus {
    new_landscape(out_handle, || Ok(Landscape::Quadratic(sample_quadratic(n, &mut Rng::new(seed))?)))
}

/// `f(x) = Σ θ_i x_i³` with `θ_i` drawn from `U[1, 2]`.
#[no_mangle]
pub unsafe extern "C" fn adine_landscape_new_cubic(
    n: usize,
    seed: u64,
    out_handle: *mut *mut AdineLandscape,
) -> AdineStatus {
    new_landscape(out_handle, || Ok(Landscape::Cubic(sample_cubic(n, &mut Rng::new(seed))?)))
}

/// `f(x, y) = x² − y²`.
#[no_mangle]
pub unsafe extern "C" fn adine_landscape_new_saddle2d(out_handle: *mut *mut AdineLandscape) -> AdineStatus {
    new_landscape(out_handle, || Ok(Landscape::Saddle2D))
}

#[no_mangle]
pub unsafe extern "C" fn adine_landscape_free(handle: *mut AdineLandscape) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Dimension of the landscape, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn adine_landscape_dim(handle: *const AdineLandscape) -> usize {
    handle.as_ref().map_or(0, |l| l.0.dim())
}

/// Default start point; `x_out` must hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn adine_landscape_default_start(
    handle: *const AdineLandscape,
    x_out: *mut f64,
    n: usize,
) -> AdineStatus {
    guard(|| {
        let l = &handle.as_ref().ok_or_else(|| null("landscape"))?.0;
        let start = l.default_start()?;
        check_len(start.dim(), n)?;
        slice_mut(x_out, n, "x_out")?.copy_from_slice(start.as_slice());
        Ok(())
    })
}

/// Value and, when `grad_out` is non-null, gradient at `x`.
#[no_mangle]
pub unsafe extern "C" fn adine_landscape_eval(
    handle: *const AdineLandscape,
    x: *const f64,
    n: usize,
    f_out: *mut f64,
    grad_out: *mut f64,
) -> AdineStatus {
    guard(|| {
        let l = &handle.as_ref().ok_or_else(|| null("landscape"))?.0;
        let x = ParamVector::new(slice(x, n, "x")?.to_vec())?;
        let f = out(f_out, "f_out")?;
        if grad_out.is_null() {
            *f = l.eval(&x)?;
        } else {
            let (value, g) = l.eval_grad(&x)?;
            slice_mut(grad_out, n, "grad_out")?.copy_from_slice(g.as_slice());
            *f = value;
        }
        Ok(())
    })
}

/// An optimizer together with its velocity and step counter.
pub struct AdineOptimizer {
    config: OptimizerConfig,
    state: Option<OptimizerState>,
}

unsafe fn new_optimizer(
    out_handle: *mut *mut AdineOptimizer,
    config: impl FnOnce() -> adine::Result<OptimizerConfig>,
) -> AdineStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        let config = config()?;
        config.validate()?;
        *slot = Box::into_raw(Box::new(AdineOptimizer { config, state: None }));
        Ok(())
    })
}

/// Classical (heavy-ball) momentum.
#[no_mangle]
pub unsafe extern "C" fn adine_optimizer_new_cm(eta: f64, m: f64, out_handle: *mut *mut AdineOptimizer) -> AdineStatus {
    new_optimizer(out_handle, || Ok(OptimizerConfig::Cm { eta, m }))
}

/// Nesterov momentum with the gradient taken at the lookahead point.
#[no_mangle]
pub unsafe extern "C" fn adine_optimizer_new_nag(
    eta: f64,
    m: f64,
    out_handle: *mut *mut AdineOptimizer,
) -> AdineStatus {
    new_optimizer(out_handle, || Ok(OptimizerConfig::Nag { eta, m }))
}

/// Nesterov momentum following the `a_t` schedule.
#[no_mangle]
pub unsafe extern "C" fn adine_optimizer_new_nag_scheduled(
    eta: f64,
    out_handle: *mut *mut AdineOptimizer,
) -> AdineStatus {
    new_optimizer(out_handle, || Ok(OptimizerConfig::NagScheduled { eta }))
}

/// Adaptive inertia: switches between `m_s < 1` and `m_g >= 1`.
#[no_mangle]
pub unsafe extern "C" fn adine_optimizer_new_adine(
    eta: f64,
    m_s: f64,
    m_g: f64,
    zeta: f64,
    out_handle: *mut *mut AdineOptimizer,
) -> AdineStatus {
    new_optimizer(out_handle, || Ok(OptimizerConfig::Adine(AdineConfig::new(eta, m_s, m_g, zeta)?)))
}

#[no_mangle]
pub unsafe extern "C" fn adine_optimizer_free(handle: *mut AdineOptimizer) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Forgets the velocity and step count.
#[no_mangle]
pub unsafe extern "C" fn adine_optimizer_reset(handle: *mut AdineOptimizer) -> AdineStatus {
    guard(|| {
        out(handle, "optimizer")?.state = None;
        Ok(())
    })
}

/// Copies the current velocity (zeros before the first step).
#[no_mangle]
pub unsafe extern "C" fn adine_optimizer_velocity(
    handle: *const AdineOptimizer,
    v_out: *mut f64,
    n: usize,
) -> AdineStatus {
    guard(|| {
        let opt = handle.as_ref().ok_or_else(|| null("optimizer"))?;
        let v_out = slice_mut(v_out, n, "v_out")?;
        match &opt.state {
            Some(s) => {
                check_len(s.velocity.dim(), n)?;
                v_out.copy_from_slice(s.velocity.as_slice());
            }
            None => v_out.fill(0.0),
        }
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AdineStepRecord {
    pub t: u64,
    /// Objective at the parameters the step started from.
    pub loss: f64,
    /// Weighted-sum loss; meaningful only when `has_wsl` is nonzero.
    pub wsl: f64,
    pub has_wsl: c_int,
    pub momentum: f64,
    pub grad_norm: f64,
}

fn step_with<O: Objective + ?Sized>(
    opt: &mut AdineOptimizer,
    obj: &O,
    theta: &mut [f64],
    record_out: *mut AdineStepRecord,
) -> Result<(), Failure> {
    let dim = theta.len();
    if let Some(s) = &opt.state {
        check_len(s.velocity.dim(), dim)?;
    }
    let state = match &opt.state {
        Some(s) => s.clone(),
        None => opt.config.init_state(dim)?,
    };
    let x = ParamVector::new(theta.to_vec())?;
    let outcome = opt.config.step(&state, obj, &x)?;
    theta.copy_from_slice(outcome.theta.as_slice());
    opt.state = Some(outcome.state);
    if let Some(rec) = unsafe { record_out.as_mut() } {
        let r = outcome.record;
        *rec = AdineStepRecord {
            t: r.t,
            loss: r.loss,
            wsl: r.wsl.unwrap_or(0.0),
            has_wsl: r.wsl.is_some() as c_int,
            momentum: r.momentum_used,
            grad_norm: r.grad_norm,
        };
    }
    Ok(())
}

/// One step on a landscape; `theta` is updated in place. `record_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn adine_optimizer_step_landscape(
    handle: *mut AdineOptimizer,
    landscape: *const AdineLandscape,
    theta: *mut f64,
    n: usize,
    record_out: *mut AdineStepRecord,
) -> AdineStatus {
    guard(|| {
        let opt = out(handle, "optimizer")?;
        let l = &landscape.as_ref().ok_or_else(|| null("landscape"))?.0;
        step_with(opt, l, slice_mut(theta, n, "theta")?, record_out)
    })
}

/// Objective supplied by the caller. Writes `f(x)` to `f_out` and, when
/// `grad_out` is non-null, the gradient. Returns 0 on success.
pub type AdineObjectiveFn = Option<
    unsafe extern "C" fn(user: *mut c_void, x: *const f64, n: usize, f_out: *mut f64, grad_out: *mut f64) -> c_int,
>;

struct Callback {
    f: unsafe extern "C" fn(*mut c_void, *const f64, usize, *mut f64, *mut f64) -> c_int,
    user: *mut c_void,
    dim: usize,
    failed: Cell<Option<c_int>>,
}

impl Callback {
    fn call(&self, x: &ParamVector, want_grad: bool) -> adine::Result<(f64, Option<ParamVector>)> {
        let mut f = f64::NAN;
        let mut g = vec![0.0; self.dim];
        let gp = if want_grad { g.as_mut_ptr() } else { ptr::null_mut() };
        let rc = unsafe { (self.f)(self.user, x.as_slice().as_ptr(), self.dim, &mut f, gp) };
        if rc != 0 {
            self.failed.set(Some(rc));
            return Err(Error::InvalidArgument(format!("objective callback returned {rc}")));
        }
        if !f.is_finite() {
            return Err(Error::NonFinite { index: 0, value: f });
        }
        Ok((f, if want_grad { Some(ParamVector::new(g)?) } else { None }))
    }
}

impl Objective for Callback {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &ParamVector) -> adine::Result<f64> {
        self.call(x, false).map(|(f, _)| f)
    }

    fn grad(&self, x: &ParamVector) -> adine::Result<ParamVector> {
        self.call(x, true).map(|(_, g)| g.expect("requested"))
    }

    fn eval_grad(&self, x: &ParamVector) -> adine::Result<(f64, ParamVector)> {
        self.call(x, true).map(|(f, g)| (f, g.expect("requested")))
    }
}

/// One step on a caller-supplied objective; `theta` is updated in place.
#[no_mangle]
pub unsafe extern "C" fn adine_optimizer_step_callback(
    handle: *mut AdineOptimizer,
    objective: AdineObjectiveFn,
    user: *mut c_void,
    theta: *mut f64,
    n: usize,
    record_out: *mut AdineStepRecord,
) -> AdineStatus {
    guard(|| {
        let opt = out(handle, "optimizer")?;
        let f = objective.ok_or_else(|| null("objective"))?;
        let cb = Callback { f, user, dim: n, failed: Cell::new(None) };
        step_with(opt, &cb, slice_mut(theta, n, "theta")?, record_out).map_err(|Failure(status, msg)| {
            match cb.failed.get() {
                Some(rc) => Failure(AdineStatus::Callback, format!("objective callback returned {rc}")),
                None => Failure(status, msg),
            }
        })
    })
}

/// `(prev + loss) / 2`.
#[no_mangle]
pub extern "C" fn adine_wsl_update(prev: f64, loss: f64) -> f64 {
    wsl_update(prev, loss)
}

/// Weighted-sum loss of a whole loss sequence, oldest first.
#[no_mangle]
pub unsafe extern "C" fn adine_wsl_closed_form(losses: *const f64, n: usize, out_value: *mut f64) -> AdineStatus {
    guard(|| {
        if n == 0 {
            return Err(Failure(AdineStatus::InvalidArgument, "empty loss sequence".into()));
        }
        *out(out_value, "out")? = wsl_closed_form(slice(losses, n, "losses")?);
        Ok(())
    })
}

/// Optimal heavy-ball step size and momentum for curvature in `[alpha, beta]`.
#[no_mangle]
pub unsafe extern "C" fn adine_polyak_optimal(
    alpha: f64,
    beta: f64,
    eta_out: *mut f64,
    m_out: *mut f64,
) -> AdineStatus {
    guard(|| {
        let (eta, m) = polyak_optimal_params(alpha, beta)?;
        *out(eta_out, "eta_out")? = eta;
        *out(m_out, "m_out")? = m;
        Ok(())
    })
}

/// Scheduled Nesterov momentum `m_t`.
#[no_mangle]
pub extern "C" fn adine_nesterov_momentum(t: u64) -> f64 {
    let mut s = NesterovSchedule::new();
    let mut m = 0.0;
    for _ in 0..=t {
        (m, s) = nesterov_momentum(s);
    }
    m
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdineRunKind {
    Race = 0,
    Train = 1,
    SweepZeta = 2,
}

/// Runs a JSON config file and writes its outputs under `out_dir`.
#[no_mangle]
pub unsafe extern "C" fn adine_run_config(
    kind: AdineRunKind,
    config_path: *const c_char,
    out_dir: *const c_char,
) -> AdineStatus {
    guard(|| {
        let text = |p: *const c_char, what: &str| -> Result<String, Failure> {
            if p.is_null() {
                return Err(null(what));
            }
            CStr::from_ptr(p)
                .to_str()
                .map(str::to_owned)
                .map_err(|_| Failure(AdineStatus::InvalidArgument, format!("{what} is not UTF-8")))
        };
        let config = text(config_path, "config_path")?;
        let dir = text(out_dir, "out_dir")?;
        let kind = match kind {
            AdineRunKind::Race => RunKind::Race,
            AdineRunKind::Train => RunKind::Train,
            AdineRunKind::SweepZeta => RunKind::SweepZeta,
        };
        run_config_file(kind, Path::new(&config), Path::new(&dir), None, None)?;
        Ok(())
    })
}
