//! C ABI over `symdecomp`.
//!
//! States and decompositions are opaque handles created by `sd_*_new`-style
//! functions and released with the matching `*_free`. Every fallible call
//! returns an [`SdStatus`]; on failure a message is available from
//! [`sd_last_error_message`] until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use symdecomp::{CoherentDecomposition, Complex64, DecompositionDiagnostics, EquivalenceMode, Error, SymmetricState};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdStatus {
    Ok = 0,
    InvalidInput = 1,
    QubitMismatch = 2,
    WrongQubitCount = 3,
    SingularMap = 4,
    ZeroState = 5,
    NonGeneric = 6,
    SolverFailure = 7,
    TieBreakUnstable = 8,
    InsufficientTerms = 9,
    ParseError = 10,
    NullPointer = 11,
    OutOfRange = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdMode {
    Lu = 0,
    Il = 1,
}

/// Opaque symmetric state.
pub struct SdState(SymmetricState);

/// Opaque coherent state decomposition with its diagnostics.
pub struct SdDecomposition {
    decomposition: CoherentDecomposition,
    diagnostics: DecompositionDiagnostics,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> SdStatus {
    match e {
        Error::InvalidInput(_) => SdStatus::InvalidInput,
        Error::QubitMismatch { .. } => SdStatus::QubitMismatch,
        Error::WrongQubitCount { .. } => SdStatus::WrongQubitCount,
        Error::SingularMap => SdStatus::SingularMap,
        Error::ZeroState => SdStatus::ZeroState,
        Error::NonGeneric { .. } => SdStatus::NonGeneric,
        Error::SolverFailure { .. } => SdStatus::SolverFailure,
        Error::TieBreakUnstable { .. } => SdStatus::TieBreakUnstable,
        Error::InsufficientTerms { .. } => SdStatus::InsufficientTerms,
        Error::Parse { .. } => SdStatus::ParseError,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Range(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SdStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SdStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(format!("{}: {e}", e.name()));
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("NullPointer: {what} is null"));
            SdStatus::NullPointer
        }
        Ok(Err(Failure::Range(msg))) => {
            set_error(format!("OutOfRange: {msg}"));
            SdStatus::OutOfRange
        }
        Err(_) => {
            set_error("Panic: internal error".into());
            SdStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    // SAFETY: the caller passes either null or a live handle from this library.
    unsafe { p.as_ref() }.ok_or(Failure::Null(what))
}

unsafe fn write<T>(p: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: non-null and, by contract, valid for writes.
    unsafe { p.write(value) };
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn sd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn sd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a state from `n_qubits + 1` Dicke amplitudes given as separate
/// real and imaginary arrays. The amplitudes are stored as given.
///
/// # Safety
/// `re` and `im` must point to `n_qubits + 1` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sd_state_new(
    n_qubits: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut SdState,
) -> SdStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(Failure::Null("amplitude array"));
        }
        if n_qubits < 1 {
            return Err(Error::InvalidInput("n_qubits must be at least 1".into()).into());
        }
        // SAFETY: the caller guarantees n_qubits + 1 readable elements.
        let (re, im) = unsafe {
            (
                std::slice::from_raw_parts(re, n_qubits + 1),
                std::slice::from_raw_parts(im, n_qubits + 1),
            )
        };
        let s = SymmetricState::new(re.iter().zip(im).map(|(a, b)| Complex64::new(*a, *b)).collect())?;
        unsafe { write(out, Box::into_raw(Box::new(SdState(s))), "out") }
    })
}

/// Parses the text state file format, normalizing as the command-line tool does.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_state_parse(text: *const c_char, out: *mut *mut SdState) -> SdStatus {
    guard(|| {
        if text.is_null() {
            return Err(Failure::Null("text"));
        }
        // SAFETY: nul-terminated by contract.
        let text = unsafe { CStr::from_ptr(text) }
            .to_str()
            .map_err(|_| Error::Parse { line: 0, message: "text is not UTF-8".into() })?;
        let parsed = symdecomp::cli::parse_state_file(text)?;
        unsafe { write(out, Box::into_raw(Box::new(SdState(parsed.state))), "out") }
    })
}

/// `(|0...0> + |1...1>)/sqrt(2)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_state_ghz(n_qubits: usize, out: *mut *mut SdState) -> SdStatus {
    guard(|| {
        let s = SymmetricState::ghz(n_qubits)?;
        unsafe { write(out, Box::into_raw(Box::new(SdState(s))), "out") }
    })
}

/// Releases a state. Null is ignored.
///
/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sd_state_free(state: *mut SdState) {
    if !state.is_null() {
        // SAFETY: created by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Number of qubits, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sd_state_n_qubits(state: *const SdState) -> usize {
    unsafe { state.as_ref() }.map_or(0, |s| s.0.n_qubits())
}

/// Dicke amplitude `k`.
///
/// # Safety
/// `state` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_state_amplitude(state: *const SdState, k: usize, re: *mut f64, im: *mut f64) -> SdStatus {
    guard(|| {
        let s = unsafe { get(state, "state") }?;
        let c = *s
            .0
            .dicke()
            .get(k)
            .ok_or_else(|| Failure::Range(format!("index {k} beyond N={}", s.0.n_qubits())))?;
        unsafe {
            write(re, c.re, "re")?;
            write(im, c.im, "im")
        }
    })
}

/// Decomposes `state` into spin coherent states; `tol` bounds the
/// reconstruction fidelity deficit.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_decompose(state: *const SdState, tol: f64, out: *mut *mut SdDecomposition) -> SdStatus {
    guard(|| {
        let s = unsafe { get(state, "state") }?;
        let (decomposition, diagnostics) = symdecomp::decompose(&s.0, tol)?;
        let d = Box::new(SdDecomposition {
            decomposition,
            diagnostics,
        });
        unsafe { write(out, Box::into_raw(d), "out") }
    })
}

/// Releases a decomposition. Null is ignored.
///
/// # Safety
/// `d` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sd_decomposition_free(d: *mut SdDecomposition) {
    if !d.is_null() {
        // SAFETY: created by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(d) });
    }
}

/// Number of terms, or 0 for a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sd_decomposition_len(d: *const SdDecomposition) -> usize {
    unsafe { d.as_ref() }.map_or(0, |d| d.decomposition.len())
}

/// Whether the first two nodes are antipodal.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sd_decomposition_is_paired(d: *const SdDecomposition) -> bool {
    unsafe { d.as_ref() }.is_some_and(|d| d.decomposition.is_paired())
}

/// Term `i`: coefficient and node angles `(theta, phi)`.
///
/// # Safety
/// `d` must be a live handle; all output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_decomposition_term(
    d: *const SdDecomposition,
    i: usize,
    re: *mut f64,
    im: *mut f64,
    theta: *mut f64,
    phi: *mut f64,
) -> SdStatus {
    guard(|| {
        let d = unsafe { get(d, "decomposition") }?;
        let t = d
            .decomposition
            .terms()
            .get(i)
            .ok_or_else(|| Failure::Range(format!("term {i} beyond {}", d.decomposition.len())))?;
        let (th, ph) = t.node.angles();
        unsafe {
            write(re, t.coeff.re, "re")?;
            write(im, t.coeff.im, "im")?;
            write(theta, th, "theta")?;
            write(phi, ph, "phi")
        }
    })
}

/// Fidelity deficit of the reconstruction, or NaN for a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sd_decomposition_fidelity_deficit(d: *const SdDecomposition) -> f64 {
    unsafe { d.as_ref() }.map_or(f64::NAN, |d| d.diagnostics.reconstruction_fidelity_deficit)
}

/// Schmidt rank `r` (terms above `zero_tol`) and measure `log2 r`.
///
/// # Safety
/// `d` must be a live handle; `rank` and `measure` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_schmidt_measure(
    d: *const SdDecomposition,
    zero_tol: f64,
    rank: *mut usize,
    measure: *mut f64,
) -> SdStatus {
    guard(|| {
        let d = unsafe { get(d, "decomposition") }?;
        let (r, p) = symdecomp::schmidt_measure(&d.decomposition, zero_tol);
        unsafe {
            write(rank, r, "rank")?;
            write(measure, p, "measure")
        }
    })
}

/// Whether two states share an LU or IL canonical form within `tol`.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_equivalent(
    a: *const SdState,
    b: *const SdState,
    mode: SdMode,
    tol: f64,
    out: *mut bool,
) -> SdStatus {
    guard(|| {
        let (a, b) = unsafe { (get(a, "a")?, get(b, "b")?) };
        let mode = match mode {
            SdMode::Lu => EquivalenceMode::LU,
            SdMode::Il => EquivalenceMode::IL,
        };
        let eq = symdecomp::equivalent(&a.0, &b.0, mode, tol)?;
        unsafe { write(out, eq, "out") }
    })
}

/// Three-qubit tangle: the hyperdeterminant value and the two closed-form
/// values, which are NaN when the state has no two-term decomposition.
///
/// # Safety
/// `state` must be a live handle; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_three_tangle(
    state: *const SdState,
    tau_oracle: *mut f64,
    tau_decomp: *mut f64,
    tau_canonical: *mut f64,
) -> SdStatus {
    guard(|| {
        let s = unsafe { get(state, "state") }?;
        let t = symdecomp::three_tangle(&s.0)?;
        unsafe {
            write(tau_oracle, t.tau_oracle, "tau_oracle")?;
            write(tau_decomp, t.tau_decomp.unwrap_or(f64::NAN), "tau_decomp")?;
            write(tau_canonical, t.tau_canonical.unwrap_or(f64::NAN), "tau_canonical")
        }
    })
}
