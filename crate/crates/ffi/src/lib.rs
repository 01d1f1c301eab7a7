//! C ABI for the chatelet library.
//!
//! Surfaces are opaque handles created by [`chatelet_surface_new`] and
//! released by [`chatelet_surface_free`]. Every fallible call returns a
//! [`ChateletStatus`]; on failure [`chatelet_last_error`] describes it.
//! Strings returned by the library are released with [`chatelet_string_free`].

use chatelet::constants::{density_bruteforce, euler_product, tau2_component, tau_loc2_exact, ProductKind};
use chatelet::descent::{decide, Decision};
use chatelet::localsolve::Place;
use chatelet::model::{reduce, CanonicalSurface, RawCoefficients};
use chatelet::Error;
use num_traits::ToPrimitive;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChateletStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    ZeroCoefficient = 3,
    DegenerateDeterminant = 4,
    Overflow = 5,
    FactorizationBudget = 6,
    Precondition = 7,
    InvariantViolation = 8,
    InternalInconsistency = 9,
    BudgetExceeded = 10,
    NoStabilization = 11,
    InvalidUtf8 = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChateletVerdict {
    LocalObstruction = 0,
    RationalPoint = 1,
    HasseFailure = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChateletProduct {
    Tau = 0,
    TauLoc = 1,
    Thm12Ratio = 2,
    HasseRatio = 3,
}

/// Outcome of [`chatelet_decide`]. `obstruction_place` is 0 for the real
/// place and the prime otherwise; it and `epsilon` are 0 when unused.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChateletDecision {
    pub verdict: ChateletVerdict,
    pub obstruction_place: u64,
    pub epsilon: [i8; 2],
}

/// Opaque reduced representative of a surface.
pub struct ChateletSurface {
    inner: CanonicalSurface,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ChateletStatus {
    match e {
        Error::Domain(_) => ChateletStatus::Domain,
        Error::ZeroCoefficient => ChateletStatus::ZeroCoefficient,
        Error::DegenerateDeterminant => ChateletStatus::DegenerateDeterminant,
        Error::Overflow(_) => ChateletStatus::Overflow,
        Error::FactorizationBudget(_) => ChateletStatus::FactorizationBudget,
        Error::Precondition(_) => ChateletStatus::Precondition,
        Error::InvariantViolation(_) => ChateletStatus::InvariantViolation,
        Error::InternalInconsistency(_) => ChateletStatus::InternalInconsistency,
        Error::BudgetExceeded { .. } => ChateletStatus::BudgetExceeded,
        Error::NoStabilization(_) => ChateletStatus::NoStabilization,
    }
}

/// Runs `f`, recording errors and turning panics into a status.
fn guard(f: impl FnOnce() -> Result<(), ChateletStatus>) -> ChateletStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ChateletStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside the library");
            ChateletStatus::Panic
        }
    }
}

fn fail(e: Error) -> ChateletStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null() -> ChateletStatus {
    set_error("null pointer argument");
    ChateletStatus::NullPointer
}

fn out_string(s: String, out: *mut *mut c_char) -> Result<(), ChateletStatus> {
    let c = CString::new(s).map_err(|_| fail(Error::InternalInconsistency("interior NUL".into())))?;
    // SAFETY: caller checked `out` is non-null
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Message for the most recent failure on this thread; empty after a
/// success. Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn chatelet_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn chatelet_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Reduces `(a, b, c, d)` to its representative and stores a new handle in
/// `*out`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn chatelet_surface_new(
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    out: *mut *mut ChateletSurface,
) -> ChateletStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let inner = reduce(RawCoefficients::new(a, b, c, d)).map_err(fail)?;
        *out = Box::into_raw(Box::new(ChateletSurface { inner }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `s` must be null or a handle from [`chatelet_surface_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chatelet_surface_free(s: *mut ChateletSurface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Writes the representative's coefficients `(a, b, c, d)` to `out[0..4]`.
///
/// # Safety
/// `s` must be a live handle and `out` must point to four writable `int64_t`.
#[no_mangle]
pub unsafe extern "C" fn chatelet_surface_coefficients(s: *const ChateletSurface, out: *mut i64) -> ChateletStatus {
    guard(|| {
        if s.is_null() || out.is_null() {
            return Err(null());
        }
        let c = (*s).inner.coefficients();
        ptr::copy_nonoverlapping(c.as_ptr(), out, 4);
        Ok(())
    })
}

/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chatelet_decide(s: *const ChateletSurface, out: *mut ChateletDecision) -> ChateletStatus {
    guard(|| {
        if s.is_null() || out.is_null() {
            return Err(null());
        }
        let d = decide(&(*s).inner).map_err(fail)?;
        *out = match d {
            Decision::LocalObstruction(place) => ChateletDecision {
                verdict: ChateletVerdict::LocalObstruction,
                obstruction_place: match place {
                    Place::Infinity => 0,
                    Place::Prime(p) => p,
                },
                epsilon: [0, 0],
            },
            Decision::RationalPoint(_) => {
                ChateletDecision { verdict: ChateletVerdict::RationalPoint, obstruction_place: 0, epsilon: [0, 0] }
            }
            Decision::HasseFailure { epsilon } => ChateletDecision {
                verdict: ChateletVerdict::HasseFailure,
                obstruction_place: 0,
                epsilon: [epsilon.eps1, epsilon.eps2],
            },
        };
        Ok(())
    })
}

/// Runs the command-line front end on `argv[0..argc]` (without the program
/// name). The JSON or text written to standard output is returned in
/// `*out_stdout` and the exit code in `*out_exit_code`.
///
/// # Safety
/// `argv` must hold `argc` valid NUL-terminated strings; the out pointers
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn chatelet_cli_run(
    argv: *const *const c_char,
    argc: usize,
    out_stdout: *mut *mut c_char,
    out_exit_code: *mut i32,
) -> ChateletStatus {
    guard(|| {
        if out_stdout.is_null() || out_exit_code.is_null() || (argv.is_null() && argc > 0) {
            return Err(null());
        }
        let mut args = vec!["chatelet".to_string()];
        for i in 0..argc {
            let p = *argv.add(i);
            if p.is_null() {
                return Err(null());
            }
            let s = CStr::from_ptr(p).to_str().map_err(|_| {
                set_error("argument is not UTF-8");
                ChateletStatus::InvalidUtf8
            })?;
            args.push(s.to_string());
        }
        let outcome = chatelet::cli::run(args);
        out_string(outcome.stdout, out_stdout)?;
        *out_exit_code = outcome.exit_code;
        Ok(())
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chatelet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn write_rational(r: &num_rational::BigRational, num: *mut i64, den: *mut i64) -> Result<(), ChateletStatus> {
    let n = r.numer().to_i64().ok_or_else(|| fail(Error::Overflow("rational numerator")))?;
    let d = r.denom().to_i64().ok_or_else(|| fail(Error::Overflow("rational denominator")))?;
    // SAFETY: caller checked both pointers
    unsafe {
        *num = n;
        *den = d;
    }
    Ok(())
}

/// The exact 2-adic local density as `num / den`.
///
/// # Safety
/// `num` and `den` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn chatelet_tau_loc2(num: *mut i64, den: *mut i64) -> ChateletStatus {
    guard(|| {
        if num.is_null() || den.is_null() {
            return Err(null());
        }
        write_rational(&tau_loc2_exact().map_err(fail)?, num, den)
    })
}

/// The component `tau_2(i, j)` as `num / den`.
///
/// # Safety
/// `num` and `den` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn chatelet_tau2_component(i: u8, j: u8, num: *mut i64, den: *mut i64) -> ChateletStatus {
    guard(|| {
        if num.is_null() || den.is_null() {
            return Err(null());
        }
        write_rational(&tau2_component(i, j).map_err(fail)?, num, den)
    })
}

/// Euler product truncated at `prime_bound`, with the bound on the log of
/// the omitted tail.
///
/// # Safety
/// `value` and `tail_bound` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn chatelet_euler_product(
    kind: ChateletProduct,
    prime_bound: u64,
    value: *mut f64,
    tail_bound: *mut f64,
) -> ChateletStatus {
    guard(|| {
        if value.is_null() || tail_bound.is_null() {
            return Err(null());
        }
        let kind = match kind {
            ChateletProduct::Tau => ProductKind::Tau,
            ChateletProduct::TauLoc => ProductKind::TauLoc,
            ChateletProduct::Thm12Ratio => ProductKind::Thm12Ratio,
            ChateletProduct::HasseRatio => ProductKind::HasseRatio,
        };
        let v = euler_product(kind, prime_bound).map_err(fail)?;
        *value = v.to_f64();
        *tail_bound = v.tail_bound;
        Ok(())
    })
}

/// Brute-force local density modulo `p^k`, subject to the work budget.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chatelet_density_bruteforce(p: u64, k: u32, out: *mut f64) -> ChateletStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = density_bruteforce(p, k).map_err(fail)?;
        Ok(())
    })
}
