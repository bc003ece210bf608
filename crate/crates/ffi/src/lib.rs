//! C interface to `mubcoh`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_construct`
//! style functions and released with the matching `*_free`. Every fallible
//! function returns a [`MubcohStatus`]; on failure a message is kept per
//! thread and can be read with [`mubcoh_last_error_message`]. Complex arrays
//! are interleaved `re, im` doubles, and matrices are stored column by
//! column.
//!
//! Pointer conventions: handles must come from this library and not yet be
//! freed; array pointers must hold the documented number of elements;
//! output pointers must be writable. Null is reported as
//! `MUBCOH_STATUS_NULL_POINTER` rather than dereferenced.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mubcoh::bounds::{self, BoundId, MubBoundParams, Povm};
use mubcoh::harness::{self, TrialState};
use mubcoh::measures::{self, NumericCgOptions};
use mubcoh::mub::{self, MubSet};
use mubcoh::numerics::{ComplexMatrix, ComplexVector};
use mubcoh::states;
use mubcoh::{Complex64, DensityMatrix, Error, PureState};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MubcohStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnsupportedDimension = 3,
    InvalidState = 4,
    Domain = 5,
    Parse = 6,
    NotUnbiased = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Opaque set of bases.
pub struct MubcohMubSet {
    inner: MubSet,
}

/// Opaque pure or mixed state.
pub struct MubcohState {
    inner: TrialState,
}

/// One row of the crossover table.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MubcohTable1Row {
    pub m1: usize,
    pub d_low: usize,
    pub d_high: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> MubcohStatus {
    match e {
        Error::UnsupportedDimension(_) => MubcohStatus::UnsupportedDimension,
        Error::InvalidState(_) | Error::NotHermitian { .. } | Error::BadRank { .. } => {
            MubcohStatus::InvalidState
        }
        Error::Domain { .. } | Error::NegativeRadicand(_) => MubcohStatus::Domain,
        Error::Parse(_) => MubcohStatus::Parse,
        Error::NotUnbiased { .. } => MubcohStatus::NotUnbiased,
        Error::Io(_) => MubcohStatus::Io,
        _ => MubcohStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), (MubcohStatus, String)>) -> MubcohStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MubcohStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            MubcohStatus::Panic
        }
    }
}

type FfiResult<T> = Result<T, (MubcohStatus, String)>;

fn lib<T>(r: mubcoh::Result<T>) -> FfiResult<T> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn invalid(message: impl Into<String>) -> (MubcohStatus, String) {
    (MubcohStatus::InvalidArgument, message.into())
}

fn non_null<'a, T>(p: *const T, name: &str) -> FfiResult<&'a T> {
    // SAFETY: callers pass either null or a pointer obtained from this library
    unsafe { p.as_ref() }.ok_or((MubcohStatus::NullPointer, format!("{name} is null")))
}

fn out_ptr<'a, T>(p: *mut T, name: &str) -> FfiResult<&'a mut T> {
    // SAFETY: callers pass either null or a pointer to writable storage
    unsafe { p.as_mut() }.ok_or((MubcohStatus::NullPointer, format!("{name} is null")))
}

fn c_str<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err((MubcohStatus::NullPointer, format!("{name} is null")));
    }
    // SAFETY: non-null and documented as a nul-terminated string
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| invalid(format!("{name} is not UTF-8")))
}

fn slice<'a, T>(p: *const T, len: usize, name: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err((MubcohStatus::NullPointer, format!("{name} is null")));
    }
    // SAFETY: non-null and documented to hold `len` elements
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn slice_mut<'a, T>(p: *mut T, len: usize, name: &str) -> FfiResult<&'a mut [T]> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err((MubcohStatus::NullPointer, format!("{name} is null")));
    }
    // SAFETY: non-null and documented to hold `len` writable elements
    Ok(unsafe { std::slice::from_raw_parts_mut(p, len) })
}

/// Copies `text` plus a terminating nul into `buf` if it fits. The needed
/// size including the nul is stored in `needed` when non-null.
fn copy_out(text: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> FfiResult<()> {
    let size = text.len() + 1;
    if !needed.is_null() {
        // SAFETY: checked non-null above
        unsafe { *needed = size };
    }
    if len < size {
        return Err((
            MubcohStatus::BufferTooSmall,
            format!("buffer of {len} bytes, {size} needed"),
        ));
    }
    let out = slice_mut(buf as *mut u8, len, "buf")?;
    out[..text.len()].copy_from_slice(text.as_bytes());
    out[text.len()] = 0;
    Ok(())
}

fn store<T>(out: *mut *mut T, value: T) -> FfiResult<()> {
    let slot = out_ptr(out, "out")?;
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn mubcoh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the calling thread's last error message into `buf`.
///
/// Returns the number of bytes needed including the terminating nul, or 0
/// when no error is recorded. Nothing is written unless the message fits.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && len >= bytes.len() {
                // SAFETY: `buf` holds at least `len >= bytes.len()` bytes
                unsafe { ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, bytes.len()) };
            }
            bytes.len()
        }
    })
}

// --- MUB sets ---------------------------------------------------------------

/// Builds the complete set of `d + 1` bases for `d = 2` or an odd prime power.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_mub_construct(d: usize, out: *mut *mut MubcohMubSet) -> MubcohStatus {
    guard(|| store(out, MubcohMubSet { inner: lib(mub::construct_mub(d))? }))
}

/// Parses a nul-terminated JSON MUB document.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_mub_from_json(
    json: *const c_char,
    out: *mut *mut MubcohMubSet,
) -> MubcohStatus {
    guard(|| {
        let text = c_str(json, "json")?;
        store(out, MubcohMubSet { inner: lib(mub::parse_mub_file(text.as_bytes()))? })
    })
}

/// Serializes to JSON. See [`mubcoh_last_error_message`] for the buffer
/// protocol: `needed` receives the size including the nul.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_mub_to_json(
    set: *const MubcohMubSet,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> MubcohStatus {
    guard(|| {
        let set = non_null(set, "set")?;
        copy_out(&mub::serialize_mub(&set.inner), buf, len, needed)
    })
}

/// Keeps the first `m` bases.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_mub_truncated(
    set: *const MubcohMubSet,
    m: usize,
    out: *mut *mut MubcohMubSet,
) -> MubcohStatus {
    guard(|| {
        let set = non_null(set, "set")?;
        store(out, MubcohMubSet { inner: lib(set.inner.truncated(m))? })
    })
}

/// Dimension, or 0 for a null handle.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_mub_dim(set: *const MubcohMubSet) -> usize {
    // SAFETY: null or a live handle
    unsafe { set.as_ref() }.map_or(0, |s| s.inner.dim())
}

/// Number of bases, or 0 for a null handle.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_mub_len(set: *const MubcohMubSet) -> usize {
    // SAFETY: null or a live handle
    unsafe { set.as_ref() }.map_or(0, |s| s.inner.len())
}

/// Copies basis `index` as a column-major interleaved `2·d·d` array.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_mub_basis(
    set: *const MubcohMubSet,
    index: usize,
    out: *mut f64,
    len: usize,
) -> MubcohStatus {
    guard(|| {
        let set = non_null(set, "set")?;
        let basis = set
            .inner
            .bases()
            .get(index)
            .ok_or_else(|| invalid(format!("basis {index} out of range")))?;
        write_matrix(basis.matrix(), out, len)
    })
}

/// Worst orthonormality and unbiasedness deviations and whether both are
/// within `tol`. Any output pointer may be null.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_mub_verify(
    set: *const MubcohMubSet,
    tol: f64,
    orthonormality: *mut f64,
    unbiasedness: *mut f64,
    passed: *mut bool,
) -> MubcohStatus {
    guard(|| {
        let set = non_null(set, "set")?;
        let r = lib(set.inner.verify(tol))?;
        if let Ok(o) = out_ptr(orthonormality, "orthonormality") {
            *o = r.max_orthonormality_deviation;
        }
        if let Ok(u) = out_ptr(unbiasedness, "unbiasedness") {
            *u = r.max_unbiasedness_deviation;
        }
        if let Ok(p) = out_ptr(passed, "passed") {
            *p = r.passed;
        }
        Ok(())
    })
}

/// Releases a set; null is ignored.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_mub_free(set: *mut MubcohMubSet) {
    if !set.is_null() {
        // SAFETY: the pointer came from Box::into_raw in this library
        drop(unsafe { Box::from_raw(set) });
    }
}

// --- states -----------------------------------------------------------------

fn read_complex(data: &[f64]) -> Vec<Complex64> {
    data.chunks_exact(2).map(|z| Complex64::new(z[0], z[1])).collect()
}

fn write_matrix(m: &ComplexMatrix, out: *mut f64, len: usize) -> FfiResult<()> {
    let n = 2 * m.nrows() * m.ncols();
    if len < n {
        return Err((
            MubcohStatus::BufferTooSmall,
            format!("buffer of {len} doubles, {n} needed"),
        ));
    }
    let out = slice_mut(out, len, "out")?;
    for (k, z) in m.iter().enumerate() {
        out[2 * k] = z.re;
        out[2 * k + 1] = z.im;
    }
    Ok(())
}

/// Pure state from `d` interleaved amplitudes (`2·d` doubles), normalized
/// to within 1e-12.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_state_pure(
    d: usize,
    amplitudes: *const f64,
    out: *mut *mut MubcohState,
) -> MubcohStatus {
    guard(|| {
        let data = slice(amplitudes, 2 * d, "amplitudes")?;
        let v = ComplexVector::from_vec(read_complex(data));
        store(out, MubcohState { inner: TrialState::Pure(lib(PureState::new(v))?) })
    })
}

/// Density matrix from a column-major interleaved `2·d·d` array.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_state_density(
    d: usize,
    entries: *const f64,
    out: *mut *mut MubcohState,
) -> MubcohStatus {
    guard(|| {
        let data = slice(entries, 2 * d * d, "entries")?;
        let m = ComplexMatrix::from_vec(d, d, read_complex(data));
        store(out, MubcohState { inner: TrialState::Mixed(lib(DensityMatrix::new(m))?) })
    })
}

/// Seeded Haar-random pure state.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_state_random_pure(
    d: usize,
    seed: u64,
    out: *mut *mut MubcohState,
) -> MubcohStatus {
    guard(|| {
        store(out, MubcohState { inner: TrialState::Pure(lib(states::sample_pure(d, seed))?) })
    })
}

/// Seeded Ginibre state of the given rank.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_state_random_density(
    d: usize,
    rank: usize,
    seed: u64,
    out: *mut *mut MubcohState,
) -> MubcohStatus {
    guard(|| {
        let rho = lib(states::sample_density(d, rank, seed))?;
        store(out, MubcohState { inner: TrialState::Mixed(rho) })
    })
}

/// `I/d`.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_state_maximally_mixed(
    d: usize,
    out: *mut *mut MubcohState,
) -> MubcohStatus {
    guard(|| {
        if d == 0 {
            return Err(invalid("dimension must be positive"));
        }
        store(out, MubcohState { inner: TrialState::Mixed(DensityMatrix::maximally_mixed(d)) })
    })
}

/// Dimension, or 0 for a null handle.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_state_dim(state: *const MubcohState) -> usize {
    // SAFETY: null or a live handle
    unsafe { state.as_ref() }.map_or(0, |s| s.inner.dim())
}

/// Copies the density matrix as a column-major interleaved `2·d·d` array.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_state_matrix(
    state: *const MubcohState,
    out: *mut f64,
    len: usize,
) -> MubcohStatus {
    guard(|| {
        let state = non_null(state, "state")?;
        write_matrix(state.inner.density().matrix(), out, len)
    })
}

/// `tr ρ²`
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_state_purity(state: *const MubcohState, out: *mut f64) -> MubcohStatus {
    guard(|| {
        let state = non_null(state, "state")?;
        *out_ptr(out, "out")? = states::purity(&state.inner.density());
        Ok(())
    })
}

/// Von Neumann entropy in nats.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_state_entropy(state: *const MubcohState, out: *mut f64) -> MubcohStatus {
    guard(|| {
        let state = non_null(state, "state")?;
        *out_ptr(out, "out")? = states::von_neumann_entropy(&state.inner.density());
        Ok(())
    })
}

/// Releases a state; null is ignored.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_state_free(state: *mut MubcohState) {
    if !state.is_null() {
        // SAFETY: the pointer came from Box::into_raw in this library
        drop(unsafe { Box::from_raw(state) });
    }
}

// --- measures ---------------------------------------------------------------

fn basis_and_state<'a>(
    set: *const MubcohMubSet,
    basis: usize,
    state: *const MubcohState,
) -> FfiResult<(&'a mub::Basis, &'a TrialState)> {
    let set = non_null(set, "set")?;
    let state = non_null(state, "state")?;
    let b = set
        .inner
        .bases()
        .get(basis)
        .ok_or_else(|| invalid(format!("basis {basis} out of range ({} bases)", set.inner.len())))?;
    if state.inner.dim() != set.inner.dim() {
        return Err(invalid(format!(
            "state dimension {} does not match the set's {}",
            state.inner.dim(),
            set.inner.dim()
        )));
    }
    Ok((b, &state.inner))
}

/// Outcome probabilities in basis `basis`; `out` holds `d` doubles.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_probabilities(
    set: *const MubcohMubSet,
    basis: usize,
    state: *const MubcohState,
    out: *mut f64,
    len: usize,
) -> MubcohStatus {
    guard(|| {
        let (b, s) = basis_and_state(set, basis, state)?;
        let p = lib(measures::probabilities(b, &s.density()))?;
        if len < p.len() {
            return Err((MubcohStatus::BufferTooSmall, format!("{} doubles needed", p.len())));
        }
        slice_mut(out, len, "out")?[..p.len()].copy_from_slice(p.as_slice());
        Ok(())
    })
}

/// Relative entropy of coherence in nats.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_coherence_relative_entropy(
    set: *const MubcohMubSet,
    basis: usize,
    state: *const MubcohState,
    out: *mut f64,
) -> MubcohStatus {
    guard(|| {
        let (b, s) = basis_and_state(set, basis, state)?;
        *out_ptr(out, "out")? = lib(measures::rel_entropy_coherence(b, &s.density()))?;
        Ok(())
    })
}

/// Geometric coherence of a pure state, `1 - max_i p_i`.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_coherence_geometric_pure(
    set: *const MubcohMubSet,
    basis: usize,
    state: *const MubcohState,
    out: *mut f64,
) -> MubcohStatus {
    guard(|| {
        let (b, s) = basis_and_state(set, basis, state)?;
        let TrialState::Pure(psi) = s else {
            return Err((MubcohStatus::InvalidState, "state is not pure".into()));
        };
        *out_ptr(out, "out")? = lib(measures::geometric_coherence_pure(b, psi))?;
        Ok(())
    })
}

/// Lower and upper estimates of the geometric coherence.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_coherence_geometric_bounds(
    set: *const MubcohMubSet,
    basis: usize,
    state: *const MubcohState,
    lower: *mut f64,
    upper: *mut f64,
) -> MubcohStatus {
    guard(|| {
        let (b, s) = basis_and_state(set, basis, state)?;
        let g = lib(measures::geometric_coherence_bounds(b, &s.density()))?;
        *out_ptr(lower, "lower")? = g.lower;
        *out_ptr(upper, "upper")? = g.upper;
        Ok(())
    })
}

/// Geometric coherence by multi-start optimization over incoherent states.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_coherence_geometric_numeric(
    set: *const MubcohMubSet,
    basis: usize,
    state: *const MubcohState,
    starts: usize,
    seed: u64,
    out: *mut f64,
) -> MubcohStatus {
    guard(|| {
        let (b, s) = basis_and_state(set, basis, state)?;
        let opts = NumericCgOptions {
            starts,
            seed,
            ..Default::default()
        };
        *out_ptr(out, "out")? = lib(measures::geometric_coherence_numeric(b, &s.density(), &opts))?.value;
        Ok(())
    })
}

// --- bounds -----------------------------------------------------------------

/// Right-hand side of the bound named `bound_id` (for example `"prop1"`).
/// `mim6` needs concrete bases; use [`mubcoh_mim6_rhs`].
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_bound_rhs(
    bound_id: *const c_char,
    d: usize,
    m: usize,
    purity: f64,
    entropy: f64,
    out: *mut f64,
) -> MubcohStatus {
    guard(|| {
        let id: BoundId = lib(c_str(bound_id, "bound_id")?.parse())?;
        let params = lib(MubBoundParams::new(d, m, purity, entropy))?;
        *out_ptr(out, "out")? = lib(bounds::eval_rhs(id, &params))?;
        Ok(())
    })
}

/// Max-overlap bound for the first `m` bases of `set` at the outcome
/// `indices[t]` of each basis.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_mim6_rhs(
    set: *const MubcohMubSet,
    m: usize,
    indices: *const usize,
    out: *mut f64,
) -> MubcohStatus {
    guard(|| {
        let set = non_null(set, "set")?;
        if m == 0 || m > set.inner.len() {
            return Err(invalid(format!("M = {m} not available ({} bases)", set.inner.len())));
        }
        let indices = slice(indices, m, "indices")?;
        let povms = set.inner.bases()[..m]
            .iter()
            .map(Povm::projective)
            .collect::<mubcoh::Result<Vec<_>>>();
        *out_ptr(out, "out")? = lib(bounds::mim6_rhs(&lib(povms)?, indices))?;
        Ok(())
    })
}

/// Smallest `M ≥ 2` at which the pure-state averaged-coherence bound
/// reaches `(ln d)/M`; 0 when `d < 2`.
#[no_mangle]
pub extern "C" fn mubcoh_crossover_m(d: usize) -> usize {
    if d < 2 {
        0
    } else {
        harness::crossover_m(d)
    }
}

/// Crossover intervals for `2 ≤ d ≤ d_max`. `count` receives the number of
/// rows; rows are written only when `capacity` suffices.
///
/// # Safety
///
/// Pointer arguments follow the conventions in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn mubcoh_table1(
    d_max: usize,
    rows: *mut MubcohTable1Row,
    capacity: usize,
    count: *mut usize,
) -> MubcohStatus {
    guard(|| {
        let table = lib(harness::table1_intervals(d_max))?;
        *out_ptr(count, "count")? = table.len();
        if capacity < table.len() {
            return Err((
                MubcohStatus::BufferTooSmall,
                format!("{} rows needed", table.len()),
            ));
        }
        let out = slice_mut(rows, capacity, "rows")?;
        for (slot, r) in out.iter_mut().zip(&table) {
            *slot = MubcohTable1Row {
                m1: r.m1,
                d_low: r.d_low,
                d_high: r.d_high,
            };
        }
        Ok(())
    })
}
