//! C ABI over `gmm-overlap`.
//!
//! Models and datasets cross the boundary as opaque handles created by a
//! `*_new` function and released with the matching `*_free`. Every call
//! returns a [`GmoStatus`]; on failure a description is available from
//! [`gmo_last_error_message`] on the same thread. Matrices are row-major
//! and labels are 1-based.
//!
//! The generated header lives at `include/gmm_overlap.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gmm_overlap::fisher::fisher_from_data;
use gmm_overlap::linalg::SymmetricMatrix;
use gmm_overlap::mixture::{estimate_from_labels, sample, GaussianComponent, LabeledDataset, MixtureModel};
use gmm_overlap::overlap::{e_distance, mle_error_mc, mle_error_quadrature, OverlapEstimate};
use gmm_overlap::separator::best_linear_separator;
use gmm_overlap::{DMatrix, DVector, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotPositiveDefinite = 3,
    NumericalFailure = 4,
    Panic = 5,
}

/// Opaque Gaussian mixture.
pub struct GmoMixture(MixtureModel);

/// Opaque labeled dataset.
pub struct GmoDataset(LabeledDataset);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GmoOverlap {
    /// Misclassification rate of the MLE rule.
    pub value: f64,
    /// Zero for quadrature.
    pub std_error: f64,
    pub n_samples: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GmoSeparator {
    pub t: f64,
    pub c: f64,
    pub u1: f64,
    pub u2: f64,
    pub p1: f64,
    pub p2: f64,
    pub p_minmax: f64,
    pub iterations: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(err: &Error) -> GmoStatus {
    match err {
        Error::NotPositiveDefinite => GmoStatus::NotPositiveDefinite,
        Error::NotSymmetric(_)
        | Error::NotSquare { .. }
        | Error::DimensionMismatch { .. }
        | Error::InvalidArgument(_)
        | Error::InsufficientClassSize { .. }
        | Error::SingleClass
        | Error::EmptyClass(_)
        | Error::EqualMeans
        | Error::ZeroDirection
        | Error::MissingLabel(_)
        | Error::DimensionTooHigh(_) => GmoStatus::InvalidArgument,
        Error::EigenNoConvergence
        | Error::SingularCovariance(_)
        | Error::ScatterIdentity(_)
        | Error::SingularTotalScatter(_)
        | Error::ResidualCheck(_)
        | Error::NoConvergence(_) => GmoStatus::NumericalFailure,
    }
}

struct Failure(GmoStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(GmoStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(GmoStatus::InvalidArgument, message.into())
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> GmoStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            GmoStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("panic inside gmm-overlap");
            GmoStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or valid for `len` reads.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn product(parts: &[usize]) -> Result<usize, Failure> {
    parts
        .iter()
        .try_fold(1usize, |acc, &x| acc.checked_mul(x))
        .ok_or_else(|| invalid("size overflow"))
}

/// Message describing the last failure on this thread; empty after a
/// successful call. Valid until the next call into this library.
#[no_mangle]
pub extern "C" fn gmo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a mixture of `k` components in `d` dimensions.
///
/// `means` holds `k·d` values, `covariances` holds `k` row-major `d×d`
/// blocks. A null `weights` means equal mixing factors.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gmo_mixture_new(
    k: usize,
    d: usize,
    weights: *const f64,
    means: *const f64,
    covariances: *const f64,
    out: *mut *mut GmoMixture,
) -> GmoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if k == 0 || d == 0 {
            return Err(invalid("k and d must be positive"));
        }
        let means = slice(means, product(&[k, d])?, "means")?;
        let covs = slice(covariances, product(&[k, d, d])?, "covariances")?;
        let components = (0..k)
            .map(|l| {
                let cov = DMatrix::from_row_slice(d, d, &covs[l * d * d..(l + 1) * d * d]);
                GaussianComponent::new(
                    DVector::from_column_slice(&means[l * d..(l + 1) * d]),
                    SymmetricMatrix::new(cov)?,
                )
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let model = if weights.is_null() {
            MixtureModel::equal_weights(components)?
        } else {
            MixtureModel::new(components, slice(weights, k, "weights")?.to_vec())?
        };
        *out = Box::into_raw(Box::new(GmoMixture(model)));
        Ok(())
    })
}

/// # Safety
/// `mixture` must be null or a handle from `gmo_mixture_new` or
/// `gmo_estimate`, not freed before.
#[no_mangle]
pub unsafe extern "C" fn gmo_mixture_free(mixture: *mut GmoMixture) {
    if !mixture.is_null() {
        drop(Box::from_raw(mixture));
    }
}

/// Dimension of the mixture, 0 for a null handle.
///
/// # Safety
/// `mixture` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gmo_mixture_dim(mixture: *const GmoMixture) -> usize {
    mixture.as_ref().map_or(0, |m| m.0.dim())
}

/// Number of components, 0 for a null handle.
///
/// # Safety
/// `mixture` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gmo_mixture_k(mixture: *const GmoMixture) -> usize {
    mixture.as_ref().map_or(0, |m| m.0.k())
}

/// Draws `n` labeled points.
///
/// # Safety
/// `mixture` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gmo_mixture_sample(
    mixture: *const GmoMixture,
    n: usize,
    seed: u64,
    out: *mut *mut GmoDataset,
) -> GmoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let m = handle(mixture, "mixture")?;
        let data = sample(&m.0, n, seed)?;
        *out = Box::into_raw(Box::new(GmoDataset(data)));
        Ok(())
    })
}

/// Builds a dataset from `n` row-major points in `d` dimensions and their
/// labels in `1..=k`.
///
/// # Safety
/// `points` must hold `n·d` values, `labels` `n` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gmo_dataset_new(
    n: usize,
    d: usize,
    k: usize,
    points: *const f64,
    labels: *const usize,
    out: *mut *mut GmoDataset,
) -> GmoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if n == 0 || d == 0 {
            return Err(invalid("n and d must be positive"));
        }
        let points = slice(points, product(&[n, d])?, "points")?.to_vec();
        let labels = slice(labels, n, "labels")?.to_vec();
        let data = LabeledDataset::new(d, k, points, labels)?;
        *out = Box::into_raw(Box::new(GmoDataset(data)));
        Ok(())
    })
}

/// # Safety
/// `dataset` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn gmo_dataset_free(dataset: *mut GmoDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Number of points, 0 for a null handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gmo_dataset_len(dataset: *const GmoDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.len())
}

/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gmo_dataset_dim(dataset: *const GmoDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.dim())
}

/// Row-major coordinates, `len·dim` values owned by the handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gmo_dataset_points(dataset: *const GmoDataset) -> *const f64 {
    dataset.as_ref().map_or(ptr::null(), |d| d.0.points().as_ptr())
}

/// Labels in `1..=k`, `len` values owned by the handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gmo_dataset_labels(dataset: *const GmoDataset) -> *const usize {
    dataset.as_ref().map_or(ptr::null(), |d| d.0.labels().as_ptr())
}

/// Per-class sample means and covariances of `dataset`.
///
/// # Safety
/// `dataset` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gmo_estimate(dataset: *const GmoDataset, out: *mut *mut GmoMixture) -> GmoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let data = handle(dataset, "dataset")?;
        *out = Box::into_raw(Box::new(GmoMixture(estimate_from_labels(&data.0)?)));
        Ok(())
    })
}

fn write_overlap(out: *mut GmoOverlap, e: OverlapEstimate) {
    // SAFETY: callers check `out` for null first
    unsafe {
        *out = GmoOverlap {
            value: e.value,
            std_error: e.std_error,
            n_samples: e.n_samples,
        };
    }
}

/// Monte Carlo estimate of the MLE misclassification rate.
///
/// # Safety
/// `mixture` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gmo_mle_error_mc(
    mixture: *const GmoMixture,
    n: usize,
    seed: u64,
    out: *mut GmoOverlap,
) -> GmoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = handle(mixture, "mixture")?;
        write_overlap(out, mle_error_mc(&m.0, n, seed)?);
        Ok(())
    })
}

/// Grid quadrature of the MLE misclassification rate, `d <= 2`.
///
/// # Safety
/// `mixture` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gmo_mle_error_quadrature(
    mixture: *const GmoMixture,
    cells_per_axis: usize,
    out: *mut GmoOverlap,
) -> GmoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = handle(mixture, "mixture")?;
        write_overlap(out, mle_error_quadrature(&m.0, cells_per_axis)?);
        Ok(())
    })
}

/// Minimax linear separator of a two-component mixture. When `b_out` is
/// not null it receives the `d` coefficients of the direction.
///
/// # Safety
/// `mixture` must be a live handle, `out` writable and `b_out` null or
/// writable for `d` values.
#[no_mangle]
pub unsafe extern "C" fn gmo_best_linear_separator(
    mixture: *const GmoMixture,
    precision: f64,
    out: *mut GmoSeparator,
    b_out: *mut f64,
) -> GmoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = handle(mixture, "mixture")?;
        if m.0.k() != 2 {
            return Err(invalid(format!("separator needs 2 components, got {}", m.0.k())));
        }
        let c = m.0.components();
        let s = best_linear_separator(&c[0], &c[1], precision)?;
        *out = GmoSeparator {
            t: s.t,
            c: s.c,
            u1: s.u1,
            u2: s.u2,
            p1: s.p1,
            p2: s.p2,
            p_minmax: s.p_minmax,
            iterations: s.iterations,
        };
        if !b_out.is_null() {
            std::slice::from_raw_parts_mut(b_out, s.b.len()).copy_from_slice(s.b.as_slice());
        }
        Ok(())
    })
}

/// Fisher coefficients of a labeled dataset. When `eigenvalues_out` is not
/// null it receives all `d` eigenvalues of `T⁻¹B`, non-increasing.
///
/// # Safety
/// `dataset` must be a live handle, the scalar outputs writable and
/// `eigenvalues_out` null or writable for `d` values.
#[no_mangle]
pub unsafe extern "C" fn gmo_fisher(
    dataset: *const GmoDataset,
    lambda_min: *mut f64,
    lambda_avg: *mut f64,
    eigenvalues_out: *mut f64,
) -> GmoStatus {
    guard(|| {
        if lambda_min.is_null() || lambda_avg.is_null() {
            return Err(null("output"));
        }
        let data = handle(dataset, "dataset")?;
        let f = fisher_from_data(&data.0)?;
        *lambda_min = f.lambda_min;
        *lambda_avg = f.lambda_avg;
        if !eigenvalues_out.is_null() {
            std::slice::from_raw_parts_mut(eigenvalues_out, f.eigenvalues.len())
                .copy_from_slice(f.eigenvalues.as_slice());
        }
        Ok(())
    })
}

/// Between-within e-distance of the points labeled `a` and `b`.
///
/// # Safety
/// `dataset` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gmo_e_distance(
    dataset: *const GmoDataset,
    a: usize,
    b: usize,
    out: *mut f64,
) -> GmoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let data = handle(dataset, "dataset")?;
        *out = e_distance(&data.0, a, b)?;
        Ok(())
    })
}
