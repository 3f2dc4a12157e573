//! C ABI for `scpsim`.
//!
//! Circuits and post-processing functions are parsed from their text formats
//! into opaque handles owned by the caller and released with the matching
//! `*_free` function. Every fallible entry point returns an [`ScpStatus`] and
//! writes its result through an out-pointer only on success. The message for
//! the most recent failure on the calling thread is available from
//! [`scp_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use scpsim::backends::BackendTag;
use scpsim::boolfn::{parse_function, BooleanFunction};
use scpsim::circuit::{parse_circuit, QuantumCircuit};
use scpsim::sim::{simulate, AccuracyBudget};
use scpsim::{oracle, Bits, Error};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Capacity = 4,
    Budget = 5,
    Panic = 6,
}

/// Pauli-expectation backend used by [`scp_simulate`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScpBackend {
    Exact = 0,
    CtEcs = 1,
    Clifford = 2,
    Commuting = 3,
}

impl From<ScpBackend> for BackendTag {
    fn from(b: ScpBackend) -> Self {
        match b {
            ScpBackend::Exact => BackendTag::Exact,
            ScpBackend::CtEcs => BackendTag::CtEcs,
            ScpBackend::Clifford => BackendTag::Clifford,
            ScpBackend::Commuting => BackendTag::Commuting,
        }
    }
}

/// Opaque circuit handle.
pub struct ScpCircuit(QuantumCircuit);

/// Opaque post-processing function handle.
pub struct ScpFunction(BooleanFunction);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ScpStatus {
    match e {
        Error::Capacity(_) => ScpStatus::Capacity,
        Error::Budget(_) => ScpStatus::Budget,
        Error::Parse { .. } => ScpStatus::Parse,
        _ => ScpStatus::InvalidArgument,
    }
}

/// Runs `body`, converting errors and panics into a status and a stored message.
fn guard(body: impl FnOnce() -> Result<(), (ScpStatus, String)>) -> ScpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ScpStatus::Ok,
        Ok(Err((status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {message}"));
            ScpStatus::Panic
        }
    }
}

fn lib<T>(r: scpsim::Result<T>) -> Result<T, (ScpStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (ScpStatus, String) {
    (ScpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (ScpStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (ScpStatus::InvalidArgument, format!("{what} is not UTF-8: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (ScpStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (ScpStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

/// Message describing the last failure on this thread, or NULL if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn scp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a circuit from its text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn scp_circuit_parse(text: *const c_char, out: *mut *mut ScpCircuit) -> ScpStatus {
    guard(|| {
        let c = lib(parse_circuit(unsafe { self::text(text, "text")? }))?;
        unsafe { write_out(out, Box::into_raw(Box::new(ScpCircuit(c)))) }
    })
}

/// Releases a circuit handle. NULL is ignored.
///
/// # Safety
/// `c` must come from [`scp_circuit_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn scp_circuit_free(c: *mut ScpCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Qubit count of a circuit, or 0 for NULL.
///
/// # Safety
/// `c` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scp_circuit_num_qubits(c: *const ScpCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.n())
}

/// Measured-qubit count of a circuit, or 0 for NULL.
///
/// # Safety
/// `c` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scp_circuit_num_measured(c: *const ScpCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.m())
}

/// Parses a post-processing function from its text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn scp_function_parse(text: *const c_char, out: *mut *mut ScpFunction) -> ScpStatus {
    guard(|| {
        let f = lib(parse_function(unsafe { self::text(text, "text")? }))?;
        unsafe { write_out(out, Box::into_raw(Box::new(ScpFunction(f)))) }
    })
}

/// Releases a function handle. NULL is ignored.
///
/// # Safety
/// `f` must come from [`scp_function_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn scp_function_free(f: *mut ScpFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Exact acceptance probability from the statevector oracle.
///
/// # Safety
/// `c` and `f` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn scp_acceptance_exact(
    c: *const ScpCircuit,
    f: *const ScpFunction,
    out: *mut f64,
) -> ScpStatus {
    guard(|| {
        let (c, f) = unsafe { (handle(c, "circuit")?, handle(f, "function")?) };
        let p = lib(oracle::acceptance_probability_exact(&c.0, &f.0))?;
        unsafe { write_out(out, p) }
    })
}

/// Exact `<Z(s)>` on the measured qubits; `s` is a bit string such as `"101"`.
///
/// # Safety
/// `c` must be a live handle, `s` a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn scp_pauli_expectation_exact(
    c: *const ScpCircuit,
    s: *const c_char,
    out: *mut f64,
) -> ScpStatus {
    guard(|| {
        let c = unsafe { handle(c, "circuit")? };
        let s: Bits = lib(unsafe { text(s, "s")? }.parse())?;
        let v = lib(oracle::pauli_expectation_exact(&c.0, &s))?;
        unsafe { write_out(out, v) }
    })
}

/// Estimates the acceptance probability to within `1/(2 p_target)` with
/// probability at least `1 - delta`.
///
/// # Safety
/// `c` and `f` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn scp_simulate(
    c: *const ScpCircuit,
    f: *const ScpFunction,
    backend: ScpBackend,
    p_target: u64,
    delta: f64,
    seed: u64,
    out: *mut f64,
) -> ScpStatus {
    guard(|| {
        let (c, f) = unsafe { (handle(c, "circuit")?, handle(f, "function")?) };
        let budget = lib(AccuracyBudget::for_function(p_target, &f.0, delta))?;
        let res = lib(simulate(&c.0, &f.0, backend.into(), &budget, seed))?;
        unsafe { write_out(out, res.estimate) }
    })
}
