//! C ABI over the skelscan pipeline.
//!
//! Conventions:
//! - Datasets and reports are opaque handles created and freed here; never
//!   free them with anything but the matching `skelscan_*_free`.
//! - Every fallible call returns a [`SkelscanStatus`]; on failure,
//!   [`skelscan_last_error`] yields a message valid on the calling thread
//!   until its next failing call.
//! - Strings crossing the boundary are NUL-terminated UTF-8; strings returned
//!   through out-pointers are freed with [`skelscan_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use skelscan::geometry::Dataset;
use skelscan::pipeline::{emit_report, parse_points_csv, run_pipeline, OutputFormat, RunConfig};
use skelscan::Error;

/// Outcome of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkelscanStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// Text crossing the boundary was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed input data (CSV syntax, ragged rows, bad numbers).
    ParseError = 3,
    /// A parameter was out of its domain.
    InvalidArgument = 4,
    /// A pipeline stage failed; see `skelscan_last_error`.
    StageError = 5,
}

/// Opaque parsed dataset.
pub struct SkelscanDataset {
    inner: Dataset,
}

/// Opaque pipeline report.
pub struct SkelscanReport {
    inner: skelscan::pipeline::RunReport,
}

/// How retained centers are chained.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkelscanChainMode {
    Rank = 0,
    Greedy = 1,
}

/// Pipeline parameters; get defaults from [`skelscan_run_params_default`]
/// and override what you need.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SkelscanRunParams {
    /// Grid step.
    pub r: f64,
    /// Count threshold; balls with counts strictly above it are retained.
    pub nu: usize,
    /// Counting radius as a multiple of `r`.
    pub radius_scale: f64,
    /// Component-splitting gap as a multiple of `r` (greedy mode).
    pub gap_factor: f64,
    /// Simplex dimension of the emitted strip (1 = segments).
    pub s: usize,
    pub chain_mode: SkelscanChainMode,
    /// Scan every grid node in the bounding box (dimension <= 3 only).
    pub dense_nodes: bool,
    /// Keep the whole density table in the report.
    pub full_table: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> SkelscanStatus {
    if err.is_input_error() {
        return SkelscanStatus::ParseError;
    }
    match err {
        Error::InvalidParam { .. }
        | Error::InvalidGridStep(_)
        | Error::DimensionMismatch { .. }
        | Error::DenseNodesDimension(_)
        | Error::DenseNodesTooMany(_) => SkelscanStatus::InvalidArgument,
        Error::Stage { source, .. } => match status_of(source) {
            SkelscanStatus::ParseError => SkelscanStatus::ParseError,
            _ => SkelscanStatus::StageError,
        },
        _ => SkelscanStatus::StageError,
    }
}

fn fail(err: &Error) -> SkelscanStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Last error message on this thread; empty string when no call has failed.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn skelscan_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn skelscan_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Default pipeline parameters (r = 1, nu = 1, greedy chaining).
#[no_mangle]
pub extern "C" fn skelscan_run_params_default() -> SkelscanRunParams {
    SkelscanRunParams {
        r: 1.0,
        nu: 1,
        radius_scale: 1.0,
        gap_factor: 3.0,
        s: 1,
        chain_mode: SkelscanChainMode::Greedy,
        dense_nodes: false,
        full_table: false,
    }
}

/// Parse points CSV (N comma-separated numbers per line, `#` comments) into
/// a dataset handle written to `out`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skelscan_dataset_from_csv(
    text: *const c_char,
    out: *mut *mut SkelscanDataset,
) -> SkelscanStatus {
    if text.is_null() || out.is_null() {
        set_error("NULL pointer argument");
        return SkelscanStatus::NullPointer;
    }
    *out = ptr::null_mut();
    let text = match CStr::from_ptr(text).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("input text is not valid UTF-8");
            return SkelscanStatus::InvalidUtf8;
        }
    };
    match parse_points_csv(text) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(SkelscanDataset { inner }));
            SkelscanStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Number of points in the dataset; 0 for NULL.
///
/// # Safety
/// `dataset` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn skelscan_dataset_len(dataset: *const SkelscanDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.len())
}

/// Dimension of the dataset's points; 0 for NULL.
///
/// # Safety
/// `dataset` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn skelscan_dataset_dim(dataset: *const SkelscanDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.dim())
}

/// Free a dataset handle; NULL is a no-op.
///
/// # Safety
/// `dataset` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn skelscan_dataset_free(dataset: *mut SkelscanDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Run the scan -> threshold -> chain -> metrics pipeline, writing a report
/// handle to `out`.
///
/// # Safety
/// All pointers must be valid; `dataset` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn skelscan_pipeline_run(
    dataset: *const SkelscanDataset,
    params: *const SkelscanRunParams,
    out: *mut *mut SkelscanReport,
) -> SkelscanStatus {
    if dataset.is_null() || params.is_null() || out.is_null() {
        set_error("NULL pointer argument");
        return SkelscanStatus::NullPointer;
    }
    *out = ptr::null_mut();
    let p = &*params;
    let config = RunConfig {
        radius_scale: p.radius_scale,
        gap_factor: p.gap_factor,
        s: p.s,
        chain_mode: match p.chain_mode {
            SkelscanChainMode::Rank => skelscan::pipeline::ChainMode::Rank,
            SkelscanChainMode::Greedy => skelscan::pipeline::ChainMode::Greedy,
        },
        dense_nodes: p.dense_nodes,
        full_table: p.full_table,
        ..RunConfig::new(p.r, p.nu)
    };
    match run_pipeline(&config, &(*dataset).inner) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(SkelscanReport { inner }));
            SkelscanStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Number of retained centers in the report; 0 for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn skelscan_report_k(report: *const SkelscanReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.k)
}

/// Skeleton vertex count; 0 for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn skelscan_report_vertex_count(report: *const SkelscanReport) -> usize {
    report
        .as_ref()
        .map_or(0, |r| r.inner.skeleton.skeleton.vertices().len())
}

/// Fraction of points within the counting radius of a skeleton vertex;
/// NaN for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn skelscan_report_coverage(report: *const SkelscanReport) -> f64 {
    report
        .as_ref()
        .map_or(f64::NAN, |r| r.inner.metrics.vertex_coverage)
}

/// Serialize the report as canonical JSON into a newly allocated string
/// written to `out`; free it with [`skelscan_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skelscan_report_to_json(
    report: *const SkelscanReport,
    out: *mut *mut c_char,
) -> SkelscanStatus {
    if report.is_null() || out.is_null() {
        set_error("NULL pointer argument");
        return SkelscanStatus::NullPointer;
    }
    *out = ptr::null_mut();
    match emit_report(&(*report).inner, OutputFormat::Json) {
        Ok(emitted) => match CString::new(emitted.bytes) {
            Ok(s) => {
                *out = s.into_raw();
                SkelscanStatus::Ok
            }
            Err(_) => {
                set_error("report JSON contained an interior NUL");
                SkelscanStatus::StageError
            }
        },
        Err(e) => fail(&e),
    }
}

/// Free a report handle; NULL is a no-op.
///
/// # Safety
/// `report` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn skelscan_report_free(report: *mut SkelscanReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Free a string returned by this library; NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a string returned through an out-pointer here, not
/// freed before.
#[no_mangle]
pub unsafe extern "C" fn skelscan_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
