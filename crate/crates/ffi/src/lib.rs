//! C ABI over the `hitrun` samplers.
//!
//! Objects are opaque handles created by `hitrun_*_new`-style constructors
//! and released with the matching `*_free`. Every fallible function returns
//! a [`HitrunStatus`]; on failure, [`hitrun_last_error`] describes the error
//! raised most recently on the calling thread.

use hitrun::chains::{ChainConfig, ChainState};
use hitrun::rng::stream;
use hitrun::{ConvexBody, Error, Target};
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitrunStatus {
    Ok = 0,
    Usage = 1,
    Domain = 2,
    DegenerateChord = 3,
    Degenerate = 4,
    Singular = 5,
    Step = 6,
    Efficiency = 7,
    Underflow = 8,
    Precondition = 9,
    Range = 10,
    Config = 11,
    Io = 12,
    NullPointer = 13,
    Panic = 14,
}

/// Kernel selector for [`hitrun_chain_new`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitrunChainKind {
    HitAndRun = 0,
    BallWalk = 1,
}

pub struct HitrunBody {
    inner: Arc<ConvexBody>,
}

pub struct HitrunTarget {
    inner: Target,
}

pub struct HitrunChain {
    state: ChainState,
    config: ChainConfig,
    target: Target,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> HitrunStatus {
    match err {
        Error::Usage(_) => HitrunStatus::Usage,
        Error::Domain(_) => HitrunStatus::Domain,
        Error::DegenerateChord { .. } => HitrunStatus::DegenerateChord,
        Error::Degenerate(_) => HitrunStatus::Degenerate,
        Error::Singular(_) => HitrunStatus::Singular,
        Error::Step(_) => HitrunStatus::Step,
        Error::Efficiency(_) => HitrunStatus::Efficiency,
        Error::Underflow(_) => HitrunStatus::Underflow,
        Error::Precondition(_) => HitrunStatus::Precondition,
        Error::Range(_) => HitrunStatus::Range,
        Error::Config(_) => HitrunStatus::Config,
        Error::Io(_) => HitrunStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HitrunStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HitrunStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            HitrunStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("panic inside hitrun".to_string());
            HitrunStatus::Panic
        }
    }
}

unsafe fn slice<'a>(ptr: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn handle<'a, T>(ptr: *const T, what: &'static str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or(Failure::Null(what))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn emit_body(out: *mut *mut HitrunBody, body: hitrun::Result<ConvexBody>) -> Result<(), Failure> {
    emit(out, HitrunBody { inner: Arc::new(body?) })
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hitrun_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hitrun_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Euclidean ball with the given centre (length `dim`) and radius.
///
/// # Safety
/// `center` must point to `dim` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hitrun_body_ball(
    center: *const f64,
    dim: usize,
    radius: f64,
    out: *mut *mut HitrunBody,
) -> HitrunStatus {
    guard(|| {
        let c = slice(center, dim, "center")?.to_vec();
        emit_body(out, ConvexBody::ball(c, radius))
    })
}

/// Axis-aligned box `[lower, upper]`.
///
/// # Safety
/// `lower` and `upper` must point to `dim` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hitrun_body_box(
    lower: *const f64,
    upper: *const f64,
    dim: usize,
    out: *mut *mut HitrunBody,
) -> HitrunStatus {
    guard(|| {
        let lo = slice(lower, dim, "lower")?.to_vec();
        let hi = slice(upper, dim, "upper")?.to_vec();
        emit_body(out, ConvexBody::boxed(lo, hi))
    })
}

/// Cube `[-half_width, half_width]^dim`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hitrun_body_cube(dim: usize, half_width: f64, out: *mut *mut HitrunBody) -> HitrunStatus {
    guard(|| emit_body(out, ConvexBody::cube(dim, half_width)))
}

/// Scaled standard simplex `{x ≥ 0, Σx ≤ scale}`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hitrun_body_simplex(dim: usize, scale: f64, out: *mut *mut HitrunBody) -> HitrunStatus {
    guard(|| emit_body(out, ConvexBody::simplex(dim, scale)))
}

/// Polytope `{x : A x ≤ b}` with `A` given row-major as `n_rows × dim`.
///
/// # Safety
/// `normals` must point to `n_rows * dim` doubles, `offsets` to `n_rows`
/// doubles, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hitrun_body_hpolytope(
    normals: *const f64,
    offsets: *const f64,
    n_rows: usize,
    dim: usize,
    out: *mut *mut HitrunBody,
) -> HitrunStatus {
    guard(|| {
        let a = slice(normals, n_rows * dim, "normals")?;
        let b = slice(offsets, n_rows, "offsets")?.to_vec();
        let rows = if dim == 0 { vec![Vec::new(); n_rows] } else { a.chunks(dim).map(<[f64]>::to_vec).collect() };
        emit_body(out, ConvexBody::hpolytope(rows, b))
    })
}

/// Dimension of the body, or 0 for a null handle.
///
/// # Safety
/// `body` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hitrun_body_dim(body: *const HitrunBody) -> usize {
    body.as_ref().map_or(0, |b| b.inner.dim())
}

/// Writes 1 to `out` when `x` lies in the body and 0 otherwise.
///
/// # Safety
/// `x` must point to `dim` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hitrun_body_contains(
    body: *const HitrunBody,
    x: *const f64,
    dim: usize,
    out: *mut i32,
) -> HitrunStatus {
    guard(|| {
        let b = handle(body, "body")?;
        let x = slice(x, dim, "x")?;
        let inside = b.inner.membership(x)?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        *out = inside as i32;
        Ok(())
    })
}

/// # Safety
/// `body` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hitrun_body_free(body: *mut HitrunBody) {
    if !body.is_null() {
        drop(Box::from_raw(body));
    }
}

/// Uniform distribution on `body`. The target keeps its own reference to
/// the body, so the body handle may be freed afterwards.
///
/// # Safety
/// `body` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hitrun_target_uniform(body: *const HitrunBody, out: *mut *mut HitrunTarget) -> HitrunStatus {
    guard(|| {
        let b = handle(body, "body")?;
        emit(out, HitrunTarget { inner: Target::uniform(b.inner.clone()) })
    })
}

/// Gaussian with mean `beta` and covariance `I/m`, truncated to `body`.
///
/// # Safety
/// `body` must be a live handle, `beta` must point to `dim` doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hitrun_target_truncated_gaussian(
    body: *const HitrunBody,
    beta: *const f64,
    dim: usize,
    m: f64,
    out: *mut *mut HitrunTarget,
) -> HitrunStatus {
    guard(|| {
        let b = handle(body, "body")?;
        let beta = slice(beta, dim, "beta")?.to_vec();
        emit(out, HitrunTarget { inner: Target::truncated_gaussian(b.inner.clone(), beta, m)? })
    })
}

/// One-step hit-and-run transition density from `u` to `x`.
///
/// # Safety
/// `u` and `x` must point to `dim` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hitrun_transition_density(
    target: *const HitrunTarget,
    u: *const f64,
    x: *const f64,
    dim: usize,
    out: *mut f64,
) -> HitrunStatus {
    guard(|| {
        let t = handle(target, "target")?;
        let u = slice(u, dim, "u")?;
        let x = slice(x, dim, "x")?;
        let d = hitrun::chains::transition_density(u, x, &t.inner)?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        *out = d;
        Ok(())
    })
}

/// # Safety
/// `target` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hitrun_target_free(target: *mut HitrunTarget) {
    if !target.is_null() {
        drop(Box::from_raw(target));
    }
}

/// Chain started at `x0` whose randomness is the stream `(seed, replica)`.
/// `delta` is the ball-walk radius and is ignored for hit-and-run; a nonzero
/// `lazy` makes every step stay put with probability 1/2.
///
/// # Safety
/// `target` must be a live handle, `x0` must point to `dim` doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hitrun_chain_new(
    target: *const HitrunTarget,
    kind: HitrunChainKind,
    delta: f64,
    lazy: i32,
    x0: *const f64,
    dim: usize,
    seed: u64,
    replica: u64,
    out: *mut *mut HitrunChain,
) -> HitrunStatus {
    guard(|| {
        let t = handle(target, "target")?;
        let x0 = slice(x0, dim, "x0")?.to_vec();
        if x0.len() != t.inner.dim() {
            return Err(Error::Usage("x0 has the wrong dimension".into()).into());
        }
        if !t.inner.body().membership(&x0)? {
            return Err(Error::Domain("x0 lies outside the body".into()).into());
        }
        let base = match kind {
            HitrunChainKind::HitAndRun => ChainConfig::hit_and_run(),
            HitrunChainKind::BallWalk => ChainConfig::ball_walk(delta),
        };
        let config = base.lazy(lazy != 0);
        config.validate()?;
        let state = ChainState::new(x0, stream(seed, replica, "ffi"));
        emit(out, HitrunChain { state, config, target: t.inner.clone() })
    })
}

/// Advances the chain by `n_steps` steps.
///
/// # Safety
/// `chain` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hitrun_chain_step(chain: *mut HitrunChain, n_steps: u64) -> HitrunStatus {
    guard(|| {
        let c = chain.as_mut().ok_or(Failure::Null("chain"))?;
        for _ in 0..n_steps {
            c.state.step(&c.config, &c.target)?;
        }
        Ok(())
    })
}

/// Copies the current point into `out` (length `dim`).
///
/// # Safety
/// `chain` must be a live handle and `out` must point to `dim` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn hitrun_chain_position(chain: *const HitrunChain, out: *mut f64, dim: usize) -> HitrunStatus {
    guard(|| {
        let c = handle(chain, "chain")?;
        if dim != c.state.x.len() {
            return Err(Error::Usage("output buffer has the wrong dimension".into()).into());
        }
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        std::slice::from_raw_parts_mut(out, dim).copy_from_slice(&c.state.x);
        Ok(())
    })
}

/// Number of steps taken so far, or 0 for a null handle.
///
/// # Safety
/// `chain` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hitrun_chain_steps(chain: *const HitrunChain) -> u64 {
    chain.as_ref().map_or(0, |c| c.state.steps_taken)
}

/// # Safety
/// `chain` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hitrun_chain_free(chain: *mut HitrunChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}
