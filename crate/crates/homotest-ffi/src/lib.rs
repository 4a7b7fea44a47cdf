//! C ABI over the homotest library.
//!
//! Conventions: every function returns an `HtStatus`; results come back
//! through out-pointers. Point clouds are opaque handles freed with
//! `ht_point_cloud_free`; returned strings are freed with `ht_string_free`.
//! On any non-`Ok` status, `ht_last_error` returns a message valid on the
//! calling thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use homotest::samplers::DistributionSpec;
use homotest::stats::{
    betti_estimate, one_sample_test, two_sample_test, QuantileMode, Regime, TestConfig,
    ThresholdRule,
};
use homotest::{BettiVector, PointCloud, Scaling};

/// Status codes returned by every FFI entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidUtf8 = 3,
    Panic = 4,
}

/// Opaque point-cloud handle.
pub struct HtPointCloud {
    inner: PointCloud,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn fail(status: HtStatus, msg: &str) -> HtStatus {
    set_error(msg);
    status
}

/// Message for the most recent failure on this thread. Never null; the
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ht_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

fn guard(f: impl FnOnce() -> HtStatus) -> HtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(HtStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, HtStatus> {
    if ptr.is_null() {
        return Err(HtStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| HtStatus::InvalidUtf8)
}

fn parse_regime(s: &str) -> Result<Regime, HtStatus> {
    s.parse().map_err(|_| HtStatus::InvalidArgument)
}

fn parse_scaling(s: &str) -> Result<Scaling, HtStatus> {
    match s {
        "per_point_norm" => Ok(Scaling::PerPointNorm),
        "none" => Ok(Scaling::None),
        "max_norm" => Ok(Scaling::MaxNorm),
        _ => Err(HtStatus::InvalidArgument),
    }
}

/// Builds a point cloud from a row-major `n x d` coordinate buffer.
///
/// # Safety
/// `data` must point to `n * d` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ht_point_cloud_new(
    data: *const f64,
    n: usize,
    d: usize,
    out: *mut *mut HtPointCloud,
) -> HtStatus {
    guard(|| {
        if data.is_null() || out.is_null() {
            return fail(HtStatus::NullPointer, "data and out must be non-null");
        }
        let slice = std::slice::from_raw_parts(data, n * d);
        let points = slice.chunks(d).map(<[f64]>::to_vec).collect();
        match PointCloud::new(points) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(HtPointCloud { inner }));
                HtStatus::Ok
            }
            Err(e) => fail(HtStatus::InvalidArgument, &e.to_string()),
        }
    })
}

/// Reads a point cloud from a CSV file of coordinate rows.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ht_point_cloud_from_csv(
    path: *const c_char,
    has_header: bool,
    out: *mut *mut HtPointCloud,
) -> HtStatus {
    guard(|| {
        if out.is_null() {
            return fail(HtStatus::NullPointer, "out must be non-null");
        }
        let path = match read_str(path) {
            Ok(p) => p,
            Err(s) => return fail(s, "path must be valid UTF-8 and non-null"),
        };
        match PointCloud::from_csv_path(path, has_header) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(HtPointCloud { inner }));
                HtStatus::Ok
            }
            Err(e) => fail(HtStatus::InvalidArgument, &e.to_string()),
        }
    })
}

/// Draws `n` points from the distribution described by `spec_json` (the
/// same JSON schema as the library's `DistributionSpec`).
///
/// # Safety
/// `spec_json` must be a valid NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ht_sample(
    spec_json: *const c_char,
    n: usize,
    seed: u64,
    out: *mut *mut HtPointCloud,
) -> HtStatus {
    guard(|| {
        if out.is_null() {
            return fail(HtStatus::NullPointer, "out must be non-null");
        }
        let text = match read_str(spec_json) {
            Ok(t) => t,
            Err(s) => return fail(s, "spec_json must be valid UTF-8 and non-null"),
        };
        let spec: DistributionSpec = match serde_json::from_str(text) {
            Ok(s) => s,
            Err(e) => return fail(HtStatus::InvalidArgument, &e.to_string()),
        };
        match homotest::samplers::sample(&spec, n, seed) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(HtPointCloud { inner }));
                HtStatus::Ok
            }
            Err(e) => fail(HtStatus::InvalidArgument, &e.to_string()),
        }
    })
}

/// Number of points in the cloud.
///
/// # Safety
/// `pc` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ht_point_cloud_len(pc: *const HtPointCloud, out: *mut usize) -> HtStatus {
    guard(|| {
        if pc.is_null() || out.is_null() {
            return fail(HtStatus::NullPointer, "pc and out must be non-null");
        }
        *out = (*pc).inner.len();
        HtStatus::Ok
    })
}

/// Ambient dimension of the cloud.
///
/// # Safety
/// `pc` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ht_point_cloud_dim(pc: *const HtPointCloud, out: *mut usize) -> HtStatus {
    guard(|| {
        if pc.is_null() || out.is_null() {
            return fail(HtStatus::NullPointer, "pc and out must be non-null");
        }
        *out = (*pc).inner.dim();
        HtStatus::Ok
    })
}

/// Betti numbers `β_0..β_{max_dim-1}` of the Rips complex at ball radius
/// `epsilon`, written into `out_betti` (length `max_dim`). The cloud is
/// used unscaled.
///
/// # Safety
/// `pc` must be a live handle; `out_betti` must hold `max_dim` values.
#[no_mangle]
pub unsafe extern "C" fn ht_betti_at_epsilon(
    pc: *const HtPointCloud,
    epsilon: f64,
    max_dim: usize,
    out_betti: *mut usize,
) -> HtStatus {
    guard(|| {
        if pc.is_null() || out_betti.is_null() {
            return fail(HtStatus::NullPointer, "pc and out_betti must be non-null");
        }
        if !(epsilon >= 0.0) || max_dim == 0 {
            return fail(HtStatus::InvalidArgument, "epsilon must be >= 0 and max_dim >= 1");
        }
        let cloud = &(*pc).inner;
        let sc = homotest::complex::build_rips(&cloud.pairwise_distances(), epsilon, max_dim);
        let betti = homotest::homology::betti_numbers(&sc, max_dim);
        std::slice::from_raw_parts_mut(out_betti, max_dim).copy_from_slice(&betti.0);
        HtStatus::Ok
    })
}

/// Betti estimate under a named threshold rule (`"critical"` or
/// `"supercritical"`) and scaling mode (`"per_point_norm"`, `"none"`,
/// `"max_norm"`); `out_betti` must hold `dim` values where `dim` is the
/// cloud's ambient dimension.
///
/// # Safety
/// `pc` must be a live handle; strings NUL-terminated; `out_betti` sized.
#[no_mangle]
pub unsafe extern "C" fn ht_betti_at_regime(
    pc: *const HtPointCloud,
    regime: *const c_char,
    scaling: *const c_char,
    out_betti: *mut usize,
) -> HtStatus {
    guard(|| {
        if pc.is_null() || out_betti.is_null() {
            return fail(HtStatus::NullPointer, "pc and out_betti must be non-null");
        }
        let cloud = &(*pc).inner;
        let rule = match read_str(regime).and_then(|s| parse_regime(s)) {
            Ok(r) => ThresholdRule { regime: r, dim: cloud.dim() },
            Err(s) => return fail(s, "regime must be critical or supercritical"),
        };
        let scaling = match read_str(scaling).and_then(parse_scaling) {
            Ok(s) => s,
            Err(s) => return fail(s, "scaling must be per_point_norm, none or max_norm"),
        };
        match betti_estimate(cloud, &rule, scaling) {
            Ok(betti) => {
                std::slice::from_raw_parts_mut(out_betti, cloud.dim()).copy_from_slice(&betti.0);
                HtStatus::Ok
            }
            Err(e) => fail(HtStatus::InvalidArgument, &e.to_string()),
        }
    })
}

unsafe fn test_config(
    pc_dim: usize,
    regime: *const c_char,
    scaling: *const c_char,
    alpha: f64,
    replications: usize,
    seed: u64,
) -> Result<TestConfig, HtStatus> {
    let regime = parse_regime(read_str(regime)?)?;
    let scaling = parse_scaling(read_str(scaling)?)?;
    Ok(TestConfig {
        rule: ThresholdRule { regime, dim: pc_dim },
        alpha,
        replications,
        seed,
        scaling,
        quantile: QuantileMode::OneMinusHalfAlpha,
    })
}

fn report_to_out(
    report: homotest::TestReport,
    out_json: *mut *mut c_char,
) -> HtStatus {
    let text = serde_json::to_string(&report).expect("report serializes");
    let cstring = CString::new(text).expect("JSON has no NUL bytes");
    unsafe { *out_json = cstring.into_raw() };
    HtStatus::Ok
}

/// One-sample Betti test of `pc` against the hypothesized vector `hyp`
/// (length = ambient dimension), with null replicates drawn from
/// `null_spec_json`. Writes a `TestReport` JSON string to `out_json`.
///
/// # Safety
/// Handles live, strings NUL-terminated, `hyp` of length `ht_point_cloud_dim`,
/// `out_json` valid; free the result with `ht_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ht_one_sample_test(
    pc: *const HtPointCloud,
    hyp: *const usize,
    null_spec_json: *const c_char,
    regime: *const c_char,
    scaling: *const c_char,
    alpha: f64,
    replications: usize,
    seed: u64,
    out_json: *mut *mut c_char,
) -> HtStatus {
    guard(|| {
        if pc.is_null() || hyp.is_null() || out_json.is_null() {
            return fail(HtStatus::NullPointer, "pc, hyp and out_json must be non-null");
        }
        let cloud = &(*pc).inner;
        let hyp = BettiVector(std::slice::from_raw_parts(hyp, cloud.dim()).to_vec());
        let spec: DistributionSpec = match read_str(null_spec_json)
            .map_err(|s| (s, "null_spec_json must be valid UTF-8".to_string()))
            .and_then(|t| {
                serde_json::from_str(t).map_err(|e| (HtStatus::InvalidArgument, e.to_string()))
            }) {
            Ok(s) => s,
            Err((status, msg)) => return fail(status, &msg),
        };
        let cfg = match test_config(cloud.dim(), regime, scaling, alpha, replications, seed) {
            Ok(c) => c,
            Err(s) => return fail(s, "invalid regime or scaling"),
        };
        match one_sample_test(cloud, &hyp, &spec, &cfg) {
            Ok(report) => report_to_out(report, out_json),
            Err(e) => fail(HtStatus::InvalidArgument, &e.to_string()),
        }
    })
}

/// Two-sample Betti test of `pc1` vs `pc2`; null replicate pairs are drawn
/// from `null_spec_json`. Writes a `TestReport` JSON string to `out_json`.
///
/// # Safety
/// As for `ht_one_sample_test`, with two live cloud handles.
#[no_mangle]
pub unsafe extern "C" fn ht_two_sample_test(
    pc1: *const HtPointCloud,
    pc2: *const HtPointCloud,
    null_spec_json: *const c_char,
    regime: *const c_char,
    scaling: *const c_char,
    alpha: f64,
    replications: usize,
    seed: u64,
    out_json: *mut *mut c_char,
) -> HtStatus {
    guard(|| {
        if pc1.is_null() || pc2.is_null() || out_json.is_null() {
            return fail(HtStatus::NullPointer, "pc1, pc2 and out_json must be non-null");
        }
        let (a, b) = (&(*pc1).inner, &(*pc2).inner);
        let spec: DistributionSpec = match read_str(null_spec_json)
            .map_err(|s| (s, "null_spec_json must be valid UTF-8".to_string()))
            .and_then(|t| {
                serde_json::from_str(t).map_err(|e| (HtStatus::InvalidArgument, e.to_string()))
            }) {
            Ok(s) => s,
            Err((status, msg)) => return fail(status, &msg),
        };
        let cfg = match test_config(a.dim(), regime, scaling, alpha, replications, seed) {
            Ok(c) => c,
            Err(s) => return fail(s, "invalid regime or scaling"),
        };
        match two_sample_test(a, b, &spec, &cfg) {
            Ok(report) => report_to_out(report, out_json),
            Err(e) => fail(HtStatus::InvalidArgument, &e.to_string()),
        }
    })
}

/// Frees a cloud handle; a null pointer is a no-op.
///
/// # Safety
/// `pc` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ht_point_cloud_free(pc: *mut HtPointCloud) {
    if !pc.is_null() {
        drop(Box::from_raw(pc));
    }
}

/// Frees a string returned through an `out_json` parameter; null is a no-op.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ht_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn cloud_roundtrip_and_betti() {
        // unit square corners
        let data = [0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let mut pc: *mut HtPointCloud = ptr::null_mut();
        unsafe {
            assert_eq!(ht_point_cloud_new(data.as_ptr(), 4, 2, &mut pc), HtStatus::Ok);
            let (mut n, mut d) = (0usize, 0usize);
            assert_eq!(ht_point_cloud_len(pc, &mut n), HtStatus::Ok);
            assert_eq!(ht_point_cloud_dim(pc, &mut d), HtStatus::Ok);
            assert_eq!((n, d), (4, 2));
            let mut betti = [0usize; 2];
            // sides joined at 2e = 1, diagonals absent: the square cycle
            assert_eq!(ht_betti_at_epsilon(pc, 0.5, 2, betti.as_mut_ptr()), HtStatus::Ok);
            assert_eq!(betti, [1, 1]);
            ht_point_cloud_free(pc);
        }
    }

    #[test]
    fn errors_set_message_and_status() {
        let mut pc: *mut HtPointCloud = ptr::null_mut();
        unsafe {
            assert_eq!(ht_point_cloud_new(ptr::null(), 1, 1, &mut pc), HtStatus::NullPointer);
            let msg = CStr::from_ptr(ht_last_error()).to_str().unwrap();
            assert!(msg.contains("non-null"));

            let bad = CString::new("{\"kind\": \"nope\"}").unwrap();
            assert_eq!(ht_sample(bad.as_ptr(), 5, 0, &mut pc), HtStatus::InvalidArgument);

            // non-finite coordinates are rejected by the core validator
            let data = [f64::NAN, 0.0];
            assert_eq!(ht_point_cloud_new(data.as_ptr(), 1, 2, &mut pc), HtStatus::InvalidArgument);
        }
    }

    #[test]
    fn sample_and_two_sample_test_roundtrip() {
        let spec = CString::new("{\"kind\": \"uniform_disk\"}").unwrap();
        let regime = CString::new("critical").unwrap();
        let scaling = CString::new("per_point_norm").unwrap();
        unsafe {
            let mut a: *mut HtPointCloud = ptr::null_mut();
            let mut b: *mut HtPointCloud = ptr::null_mut();
            assert_eq!(ht_sample(spec.as_ptr(), 50, 1, &mut a), HtStatus::Ok);
            assert_eq!(ht_sample(spec.as_ptr(), 50, 2, &mut b), HtStatus::Ok);
            let mut json: *mut c_char = ptr::null_mut();
            let status = ht_two_sample_test(
                a, b, spec.as_ptr(), regime.as_ptr(), scaling.as_ptr(), 0.05, 20, 0, &mut json,
            );
            assert_eq!(status, HtStatus::Ok);
            let text = CStr::from_ptr(json).to_str().unwrap().to_string();
            let report: serde_json::Value = serde_json::from_str(&text).unwrap();
            assert!(report["critical_value"].is_number());
            assert!(report["reject"].is_boolean());
            ht_string_free(json);
            ht_point_cloud_free(a);
            ht_point_cloud_free(b);
        }
    }

    #[test]
    fn one_sample_test_roundtrip() {
        let spec = CString::new("{\"kind\": \"uniform_disk\"}").unwrap();
        let regime = CString::new("supercritical").unwrap();
        let scaling = CString::new("none").unwrap();
        unsafe {
            let mut a: *mut HtPointCloud = ptr::null_mut();
            assert_eq!(ht_sample(spec.as_ptr(), 60, 3, &mut a), HtStatus::Ok);
            let hyp = [1usize, 0];
            let mut json: *mut c_char = ptr::null_mut();
            let status = ht_one_sample_test(
                a, hyp.as_ptr(), spec.as_ptr(), regime.as_ptr(), scaling.as_ptr(), 0.05, 20, 0,
                &mut json,
            );
            assert_eq!(status, HtStatus::Ok);
            ht_string_free(json);
            ht_point_cloud_free(a);
        }
    }
}
