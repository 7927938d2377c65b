//! C ABI for the certified positive-definiteness checks and Wiener-type
//! brackets in the `conedual` crate.
//!
//! Conventions:
//! - All functions return a `CdStatus` code; results come back through out
//!   parameters. `CD_STATUS_OK` (0) means the out parameters are valid.
//! - Sequences are opaque handles created with `cd_seq_from_half_values`
//!   and released with `cd_seq_free`. Handles are immutable after creation
//!   and safe to share across threads.
//! - No function panics across the boundary; internal panics are caught
//!   and reported as `CD_STATUS_INTERNAL`.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use conedual::cones::is_positive_definite;
use conedual::wiener::run_wiener_bracket;
use conedual::{CertStatus, SymmetricSequence, TorusGrid, DEFAULT_EPS_PD};

/// Status codes returned by every FFI entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdStatus {
    /// Success; out parameters are populated.
    CdStatusOk = 0,
    /// A pointer argument was null.
    CdStatusNullPointer = 1,
    /// An argument was out of range or otherwise invalid.
    CdStatusInvalidArgument = 2,
    /// The computation failed numerically (e.g. a linear program could not
    /// be solved to the required tolerance).
    CdStatusNumerical = 3,
    /// An internal error; indicates a bug in the library.
    CdStatusInternal = 4,
}

/// Verdict of a positive-definiteness check.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdPdVerdict {
    /// Certified: the Fourier transform is nonnegative everywhere.
    CdPdCertified = 0,
    /// Refuted: a point with strictly negative Fourier transform exists.
    CdPdRefuted = 1,
    /// Neither certified nor refuted at the requested resolution.
    CdPdInconclusive = 2,
}

/// Opaque handle to a finitely supported symmetric sequence on Z.
pub struct CdSequence {
    inner: SymmetricSequence,
}

fn err_code(e: &conedual::ConeDualError) -> CdStatus {
    match e {
        conedual::ConeDualError::InvalidArgument(_)
        | conedual::ConeDualError::DimensionMismatch { .. }
        | conedual::ConeDualError::InvalidIndexSet(_)
        | conedual::ConeDualError::Config(_) => CdStatus::CdStatusInvalidArgument,
        conedual::ConeDualError::Lp(_) | conedual::ConeDualError::Soundness(_) => {
            CdStatus::CdStatusNumerical
        }
        _ => CdStatus::CdStatusInternal,
    }
}

fn guarded(f: impl FnOnce() -> CdStatus) -> CdStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(CdStatus::CdStatusInternal)
}

/// Creates a symmetric sequence on Z from its values at 0, 1, ..., len-1;
/// the value at -k mirrors the value at k. Returns null on invalid input.
///
/// # Safety
/// `values` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn cd_seq_from_half_values(
    values: *const f64,
    len: usize,
) -> *mut CdSequence {
    if values.is_null() || len == 0 {
        return std::ptr::null_mut();
    }
    let slice = std::slice::from_raw_parts(values, len);
    if slice.iter().any(|v| !v.is_finite()) {
        return std::ptr::null_mut();
    }
    let seq = SymmetricSequence::from_half_values(slice);
    Box::into_raw(Box::new(CdSequence { inner: seq }))
}

/// Releases a sequence handle. Passing null is a no-op.
///
/// # Safety
/// `seq` must be null or a pointer returned by `cd_seq_from_half_values`
/// that has not been freed already.
#[no_mangle]
pub unsafe extern "C" fn cd_seq_free(seq: *mut CdSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// Reads the value of the sequence at index `k` (symmetric in `k`).
///
/// # Safety
/// `seq` and `out_value` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cd_seq_value_at(
    seq: *const CdSequence,
    k: i64,
    out_value: *mut f64,
) -> CdStatus {
    if seq.is_null() || out_value.is_null() {
        return CdStatus::CdStatusNullPointer;
    }
    let s = &(*seq).inner;
    *out_value = s.value_at(&conedual::MultiIndex::new(vec![k]));
    CdStatus::CdStatusOk
}

/// Checks whether the sequence is positive definite (its Fourier transform
/// is nonnegative on the circle), with a certified grid-plus-margin test at
/// `grid_points` sample points and tolerance `eps_pd` (pass 0 for the
/// default). Writes the verdict and a certified lower bound for the minimum
/// of the Fourier transform.
///
/// # Safety
/// `seq`, `out_verdict`, and `out_lower_bound` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cd_check_pd(
    seq: *const CdSequence,
    grid_points: usize,
    eps_pd: f64,
    out_verdict: *mut CdPdVerdict,
    out_lower_bound: *mut f64,
) -> CdStatus {
    if seq.is_null() || out_verdict.is_null() || out_lower_bound.is_null() {
        return CdStatus::CdStatusNullPointer;
    }
    if !eps_pd.is_finite() || eps_pd < 0.0 {
        return CdStatus::CdStatusInvalidArgument;
    }
    let s = &(*seq).inner;
    let verdict = &mut *out_verdict;
    let lower = &mut *out_lower_bound;
    guarded(|| {
        let grid = match TorusGrid::new(1, grid_points) {
            Ok(g) => g,
            Err(e) => return err_code(&e),
        };
        let eps = if eps_pd == 0.0 { DEFAULT_EPS_PD } else { eps_pd };
        let status = is_positive_definite(s, &grid, eps);
        *verdict = match status.certified.status {
            CertStatus::CertifiedNonneg => CdPdVerdict::CdPdCertified,
            CertStatus::Refuted => CdPdVerdict::CdPdRefuted,
            CertStatus::Inconclusive => CdPdVerdict::CdPdInconclusive,
        };
        *lower = status.certified.lower_bound();
        CdStatus::CdStatusOk
    })
}

/// Computes a certified two-sided bracket for the extremal ratio K(L, N):
/// the dual linear program at truncation radius `truncation_radius` and
/// grid resolution `grid_points` gives the upper side, and a randomized
/// autocorrelation search with `search_budget` trials seeded by `seed`
/// gives the lower side. On success `out_lower <= K(L, N) <= out_upper`.
///
/// # Safety
/// `out_lower` and `out_upper` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cd_wiener_bracket(
    l: usize,
    n: usize,
    truncation_radius: usize,
    grid_points: usize,
    search_budget: usize,
    seed: u64,
    out_lower: *mut f64,
    out_upper: *mut f64,
) -> CdStatus {
    if out_lower.is_null() || out_upper.is_null() {
        return CdStatus::CdStatusNullPointer;
    }
    if l < 2 || n < 1 {
        return CdStatus::CdStatusInvalidArgument;
    }
    let lower = &mut *out_lower;
    let upper = &mut *out_upper;
    guarded(|| {
        match run_wiener_bracket(
            l,
            n,
            &[(truncation_radius, grid_points)],
            search_budget,
            seed,
            DEFAULT_EPS_PD,
        ) {
            Ok(bracket) => {
                *lower = bracket.lower;
                *upper = bracket.upper;
                CdStatus::CdStatusOk
            }
            Err(e) => err_code(&e),
        }
    })
}

/// Returns a static, null-terminated version string.
#[no_mangle]
pub extern "C" fn cd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
