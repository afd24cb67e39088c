//! C ABI over `qeraser`.
//!
//! Objects cross the boundary as opaque handles created by `qe_*_new` (or
//! returned through out-pointers) and released with the matching `qe_*_free`.
//! Every fallible call returns a [`QeStatus`]; the message of the most recent
//! failure on the calling thread is available from [`qe_last_error`].
//! Matrices are passed as row-major arrays of real and imaginary parts.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use qeraser::correction::{eraser_scenario, run_correction};
use qeraser::decomposition::{decompose, SearchConfig};
use qeraser::infometrics::{bounds_report, entropy_exchange};
use qeraser::{validate_correlation, ComplexMatrix, DensityMatrix, Error, FlatDecomposition, SchurChannel};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Input is not a valid correlation matrix, state or decomposition.
    Invalid = 3,
    NoDecomposition = 4,
    VerificationFailed = 5,
    RecoveryFailed = 6,
    Panic = 7,
}

pub struct QeChannel(SchurChannel);
pub struct QeState(DensityMatrix);
pub struct QeDecomposition(FlatDecomposition);

/// Entropies in bits. Fields tied to a decomposition are NaN, or -1 for
/// flags, when none was supplied.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QeBounds {
    pub dim: usize,
    pub rank: usize,
    pub s_xi_over_d: f64,
    pub s_ex_maximal: f64,
    pub two_log_rank: f64,
    pub h_p: f64,
    pub lower_bound_satisfied: i32,
    pub upper_bound_satisfied: i32,
    pub orthogonal_family: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QeLedger {
    pub stored_bits: f64,
    pub extracted_bits: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QeStatus {
    match e {
        Error::NoDecompositionFound { .. } => QeStatus::NoDecomposition,
        Error::VerificationFailure(_) => QeStatus::VerificationFailed,
        Error::RecoveryFailure { .. } => QeStatus::RecoveryFailed,
        Error::InvalidArgument(_) => QeStatus::InvalidArgument,
        _ => QeStatus::Invalid,
    }
}

enum Fail {
    Null,
    Arg(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QeStatus::Ok,
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument".into());
            QeStatus::NullPointer
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_error(msg);
            QeStatus::InvalidArgument
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            QeStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

unsafe fn read_matrix(dim: usize, re: *const f64, im: *const f64) -> Result<ComplexMatrix, Fail> {
    if re.is_null() || im.is_null() {
        return Err(Fail::Null);
    }
    if dim == 0 {
        return Err(Fail::Arg("dimension must be positive".into()));
    }
    let n = dim.checked_mul(dim).ok_or_else(|| Fail::Arg("dimension too large".into()))?;
    let re = std::slice::from_raw_parts(re, n);
    let im = std::slice::from_raw_parts(im, n);
    let data = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
    Ok(ComplexMatrix::new(dim, dim, data)?)
}

unsafe fn write_matrix(m: &ComplexMatrix, re: *mut f64, im: *mut f64, len: usize) -> Result<(), Fail> {
    if re.is_null() || im.is_null() {
        return Err(Fail::Null);
    }
    let data = m.data();
    if len < data.len() {
        return Err(Fail::Arg(format!("buffer holds {len} entries, need {}", data.len())));
    }
    for (i, z) in data.iter().enumerate() {
        *re.add(i) = z.re;
        *im.add(i) = z.im;
    }
    Ok(())
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length excluding the NUL.
/// Returns 0 when there is no error.
///
/// # Safety
/// `buf` must be NULL or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn qe_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Validates a correlation matrix and wraps it as a channel.
///
/// # Safety
/// `re` and `im` must each point to `dim * dim` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qe_channel_new(dim: usize, re: *const f64, im: *const f64, out: *mut *mut QeChannel) -> QeStatus {
    guard(|| {
        let m = read_matrix(dim, re, im)?;
        put(out, QeChannel(SchurChannel::new(validate_correlation(&m)?)))
    })
}

/// # Safety
/// `ch` must be NULL or a handle from [`qe_channel_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qe_channel_free(ch: *mut QeChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// Dimension of the channel, or 0 for NULL.
///
/// # Safety
/// `ch` must be NULL or a live channel handle.
#[no_mangle]
pub unsafe extern "C" fn qe_channel_dim(ch: *const QeChannel) -> usize {
    ch.as_ref().map_or(0, |c| c.0.dim())
}

/// Whether every off-diagonal |ξ_kl| is below 1.
///
/// # Safety
/// `ch` must be a live channel handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qe_channel_is_complete(ch: *const QeChannel, out: *mut bool) -> QeStatus {
    guard(|| {
        let ch = deref(ch)?;
        if out.is_null() {
            return Err(Fail::Null);
        }
        *out = ch.0.complete();
        Ok(())
    })
}

/// Validates a density matrix.
///
/// # Safety
/// `re` and `im` must each point to `dim * dim` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qe_state_new(dim: usize, re: *const f64, im: *const f64, out: *mut *mut QeState) -> QeStatus {
    guard(|| {
        let m = read_matrix(dim, re, im)?;
        put(out, QeState(DensityMatrix::new(m)?))
    })
}

/// # Safety
/// `st` must be NULL or a state handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qe_state_free(st: *mut QeState) {
    if !st.is_null() {
        drop(Box::from_raw(st));
    }
}

/// Dimension of the state, or 0 for NULL.
///
/// # Safety
/// `st` must be NULL or a live state handle.
#[no_mangle]
pub unsafe extern "C" fn qe_state_dim(st: *const QeState) -> usize {
    st.as_ref().map_or(0, |s| s.0.dim())
}

/// Copies the entries, row-major, into `re` and `im` (each of length `len ≥ dim²`).
///
/// # Safety
/// `st` must be a live state handle; `re` and `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qe_state_entries(st: *const QeState, re: *mut f64, im: *mut f64, len: usize) -> QeStatus {
    guard(|| write_matrix(deref(st)?.0.matrix(), re, im, len))
}

/// Applies the channel `steps` times (Schrödinger picture).
///
/// # Safety
/// `ch` and `st` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qe_channel_apply(
    ch: *const QeChannel,
    st: *const QeState,
    steps: u32,
    out: *mut *mut QeState,
) -> QeStatus {
    guard(|| {
        let rho = deref(ch)?.0.iterate(&deref(st)?.0, steps)?;
        put(out, QeState(rho))
    })
}

/// Entropy exchange S(ρ∞) of the channel on `st`, in bits.
///
/// # Safety
/// `ch` and `st` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qe_entropy_exchange(ch: *const QeChannel, st: *const QeState, out: *mut f64) -> QeStatus {
    guard(|| {
        let s = entropy_exchange(&deref(ch)?.0, &deref(st)?.0)?;
        if out.is_null() {
            return Err(Fail::Null);
        }
        *out = s;
        Ok(())
    })
}

/// Random-unitary decomposition: closed form for d = 2 and ξ = I, otherwise
/// a seeded numerical search with `restarts` restarts (0 means the default).
///
/// # Safety
/// `ch` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qe_decompose(
    ch: *const QeChannel,
    seed: u64,
    restarts: usize,
    out: *mut *mut QeDecomposition,
) -> QeStatus {
    guard(|| {
        let mut config = SearchConfig {
            seed,
            ..SearchConfig::default()
        };
        if restarts > 0 {
            config.restarts = restarts;
        }
        let dec = decompose(deref(ch)?.0.xi(), &config)?;
        put(out, QeDecomposition(dec))
    })
}

/// Builds a decomposition from `terms` weights and `terms * dim` phases (radians, row per term).
///
/// # Safety
/// `weights` must hold `terms` doubles, `phases` `terms * dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qe_decomposition_new(
    dim: usize,
    terms: usize,
    weights: *const f64,
    phases: *const f64,
    out: *mut *mut QeDecomposition,
) -> QeStatus {
    guard(|| {
        if weights.is_null() || phases.is_null() {
            return Err(Fail::Null);
        }
        if dim == 0 || terms == 0 {
            return Err(Fail::Arg("dimension and term count must be positive".into()));
        }
        let w = std::slice::from_raw_parts(weights, terms).to_vec();
        let ph = std::slice::from_raw_parts(phases, terms * dim);
        let rows = ph.chunks(dim).map(<[f64]>::to_vec).collect();
        put(out, QeDecomposition(FlatDecomposition::new(dim, w, rows)?))
    })
}

/// # Safety
/// `dec` must be NULL or a decomposition handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qe_decomposition_free(dec: *mut QeDecomposition) {
    if !dec.is_null() {
        drop(Box::from_raw(dec));
    }
}

/// Number of terms, or 0 for NULL.
///
/// # Safety
/// `dec` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qe_decomposition_terms(dec: *const QeDecomposition) -> usize {
    dec.as_ref().map_or(0, |d| d.0.num_terms())
}

/// Shannon entropy of the weights in bits, NaN for NULL.
///
/// # Safety
/// `dec` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qe_decomposition_entropy(dec: *const QeDecomposition) -> f64 {
    dec.as_ref().map_or(f64::NAN, |d| d.0.entropy())
}

/// Copies weights (`terms` values) and phases (`terms * dim`, row per term).
///
/// # Safety
/// `dec` must be a live handle; `weights` must hold `weights_len` doubles and
/// `phases` `phases_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qe_decomposition_data(
    dec: *const QeDecomposition,
    weights: *mut f64,
    weights_len: usize,
    phases: *mut f64,
    phases_len: usize,
) -> QeStatus {
    guard(|| {
        let dec = &deref(dec)?.0;
        if weights.is_null() || phases.is_null() {
            return Err(Fail::Null);
        }
        let flat: Vec<f64> = dec.phases().iter().flatten().copied().collect();
        if weights_len < dec.num_terms() || phases_len < flat.len() {
            return Err(Fail::Arg(format!(
                "need {} weights and {} phases",
                dec.num_terms(),
                flat.len()
            )));
        }
        ptr::copy_nonoverlapping(dec.weights().as_ptr(), weights, dec.num_terms());
        ptr::copy_nonoverlapping(flat.as_ptr(), phases, flat.len());
        Ok(())
    })
}

/// Simulates measuring the environment and undoing the heralded unitary.
/// On success `residual` receives ‖recovered − ρ‖_F and `recovered` (if not
/// NULL) a new state handle.
///
/// # Safety
/// `ch`, `dec` and `st` must be live handles; `residual` must be writable;
/// `recovered` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qe_correct(
    ch: *const QeChannel,
    dec: *const QeDecomposition,
    st: *const QeState,
    residual: *mut f64,
    recovered: *mut *mut QeState,
) -> QeStatus {
    guard(|| {
        let run = run_correction(&deref(ch)?.0, &deref(dec)?.0, &deref(st)?.0)?;
        if residual.is_null() {
            return Err(Fail::Null);
        }
        *residual = run.residual;
        if !recovered.is_null() {
            put(recovered, QeState(run.recovered))?;
        }
        Ok(())
    })
}

/// Entropy bounds; `dec` may be NULL.
///
/// # Safety
/// `ch` must be a live handle, `dec` NULL or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qe_bounds(ch: *const QeChannel, dec: *const QeDecomposition, out: *mut QeBounds) -> QeStatus {
    guard(|| {
        let ch = deref(ch)?;
        let dec = dec.as_ref().map(|d| &d.0);
        let r = bounds_report(&ch.0, dec)?;
        if out.is_null() {
            return Err(Fail::Null);
        }
        let flag = |b: Option<bool>| b.map_or(-1, i32::from);
        *out = QeBounds {
            dim: r.dim,
            rank: r.rank,
            s_xi_over_d: r.s_xi_over_d,
            s_ex_maximal: r.s_ex_maximal,
            two_log_rank: r.two_log_rank,
            h_p: r.h_p.unwrap_or(f64::NAN),
            lower_bound_satisfied: flag(r.lower_bound_satisfied),
            upper_bound_satisfied: flag(r.upper_bound_satisfied),
            orthogonal_family: flag(r.orthogonal_family),
        };
        Ok(())
    })
}

/// Information ledger of the d-slit eraser, in bits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qe_eraser_ledger(d: usize, out: *mut QeLedger) -> QeStatus {
    guard(|| {
        let s = eraser_scenario(d)?;
        if out.is_null() {
            return Err(Fail::Null);
        }
        *out = QeLedger {
            stored_bits: s.ledger.stored_bits,
            extracted_bits: s.ledger.extracted_bits,
        };
        Ok(())
    })
}
