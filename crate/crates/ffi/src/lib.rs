//! C interface to `hardy_cones`: cones and spectra behind opaque handles,
//! integer status codes, and a thread-local message for the last failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hardy_cones::closed_forms::{ftt_derive, FttClass};
use hardy_cones::geometry::ConeSpec;
use hardy_cones::hardy::derive_constants;
use hardy_cones::report::{body_json, ftt_summary, parse_config, run_pipeline};
use hardy_cones::spectral::{mu0_compute, sigma_of_mu, SpectralResult};
use hardy_cones::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidCone = 3,
    NoConvergence = 4,
    InconsistentSpectrum = 5,
    Config = 6,
    Io = 7,
    Panic = 8,
    Other = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcFttClass {
    Critical = 0,
    Subcritical = 1,
    CriticalConjectured = 2,
}

/// Constants of `-Δ - μ/δ²` on a cone.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HcConstants {
    pub n: usize,
    pub mu: f64,
    pub mu0: f64,
    pub sigma: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub lambda: f64,
}

/// Opaque cone.
pub struct HcCone(ConeSpec);

/// Opaque result of a `σ(μ)` computation.
pub struct HcSpectrum(SpectralResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HcStatus {
    match e {
        Error::InvalidCone(_) => HcStatus::InvalidCone,
        Error::InvalidArgument(_) | Error::OutsideCrossSection(_) | Error::Mesh(_) => HcStatus::InvalidArgument,
        Error::NoConvergence(_) | Error::SignChange(_) => HcStatus::NoConvergence,
        Error::InconsistentSpectrum(_) => HcStatus::InconsistentSpectrum,
        Error::Config(_) => HcStatus::Config,
        Error::Io { .. } => HcStatus::Io,
        Error::Serialization(_) => HcStatus::Other,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), HcStatus>) -> HcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HcStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            HcStatus::Panic
        }
    }
}

fn fail(e: Error) -> HcStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null(what: &str) -> HcStatus {
    set_error(&format!("{what} is null"));
    HcStatus::NullPointer
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), HcStatus> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Copies the message of the last failure on this thread into `buf`
/// (NUL-terminated, truncated to `len`) and returns the full length without
/// the terminator, or 0 when there is none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

fn new_cone(spec: hardy_cones::Result<ConeSpec>, out: *mut *mut HcCone) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = spec.map_err(fail)?;
        // SAFETY: checked non-null above.
        unsafe { out.write(Box::into_raw(Box::new(HcCone(spec)))) };
        Ok(())
    })
}

/// Planar sector `{0 < θ < alpha}`.
///
/// # Safety
/// `out` must be null or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hc_cone_sector(alpha: f64, out: *mut *mut HcCone) -> HcStatus {
    new_cone(ConeSpec::sector(alpha), out)
}

/// Circular cone in `R^n` of polar half-angle `alpha` around the last axis.
///
/// # Safety
/// `out` must be null or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hc_cone_cap(n: usize, alpha: f64, out: *mut *mut HcCone) -> HcStatus {
    new_cone(ConeSpec::cap(n, alpha), out)
}

/// Polyhedral cone over a spherical polygon with `count` unit vertices
/// stored as `3 * count` doubles.
///
/// # Safety
/// `vertices` must point to `3 * count` readable doubles; `out` must be
/// null or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hc_cone_polygon(vertices: *const f64, count: usize, out: *mut *mut HcCone) -> HcStatus {
    if vertices.is_null() {
        return null("vertices");
    }
    let Some(total) = count.checked_mul(3) else {
        set_error("vertex count overflows");
        return HcStatus::InvalidArgument;
    };
    let flat = std::slice::from_raw_parts(vertices, total);
    let v: Vec<[f64; 3]> = flat.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    new_cone(ConeSpec::polygon(v), out)
}

/// # Safety
/// `cone` must be null or a handle from an `hc_cone_*` constructor that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn hc_cone_free(cone: *mut HcCone) {
    if !cone.is_null() {
        drop(Box::from_raw(cone));
    }
}

/// Ambient dimension of the cone, or 0 for a null handle.
///
/// # Safety
/// `cone` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_cone_dim(cone: *const HcCone) -> usize {
    cone.as_ref().map_or(0, |c| c.0.dim())
}

/// Distance from `x` (of length `len`) to the boundary of the cone.
///
/// # Safety
/// `cone` must be a live handle, `x` must point to `len` readable doubles
/// and `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn hc_cone_delta(cone: *const HcCone, x: *const f64, len: usize, out: *mut f64) -> HcStatus {
    guard(|| {
        let cone = cone.as_ref().ok_or_else(|| null("cone"))?;
        if x.is_null() {
            return Err(null("x"));
        }
        let x = std::slice::from_raw_parts(x, len);
        write_out(out, cone.0.delta(x).map_err(fail)?)
    })
}

/// `σ(μ)` with `levels` grid doublings and default solver options.
///
/// # Safety
/// `cone` must be a live handle and `out` valid for a pointer write. The
/// handle written to `out` must be released with [`hc_spectrum_free`].
#[no_mangle]
pub unsafe extern "C" fn hc_sigma(cone: *const HcCone, mu: f64, levels: usize, out: *mut *mut HcSpectrum) -> HcStatus {
    guard(|| {
        let cone = cone.as_ref().ok_or_else(|| null("cone"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = sigma_of_mu(&cone.0, mu, levels).map_err(fail)?;
        out.write(Box::into_raw(Box::new(HcSpectrum(r))));
        Ok(())
    })
}

/// Extrapolated eigenvalue of a spectrum, NaN for a null handle.
///
/// # Safety
/// `spectrum` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_spectrum_sigma(spectrum: *const HcSpectrum) -> f64 {
    spectrum.as_ref().map_or(f64::NAN, |s| s.0.sigma)
}

/// Principal eigenfunction at the unit vector `x/|x|`, normalized to
/// maximum 1.
///
/// # Safety
/// `spectrum` must be a live handle, `x` must point to `len` readable
/// doubles and `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn hc_spectrum_eval(spectrum: *const HcSpectrum, x: *const f64, len: usize, out: *mut f64) -> HcStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        if x.is_null() {
            return Err(null("x"));
        }
        let x = std::slice::from_raw_parts(x, len);
        let p = hardy_cones::geometry::PointOnSphere::normalized(x).map_err(fail)?;
        write_out(out, s.0.phi.eval(&p).map_err(fail)?)
    })
}

/// # Safety
/// `spectrum` must be null or a handle from [`hc_sigma`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_spectrum_free(spectrum: *mut HcSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Critical value `μ₀` of the cone.
///
/// # Safety
/// `cone` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn hc_mu0(cone: *const HcCone, levels: usize, out: *mut f64) -> HcStatus {
    guard(|| {
        let cone = cone.as_ref().ok_or_else(|| null("cone"))?;
        write_out(out, mu0_compute(&cone.0, levels).map_err(fail)?.mu0)
    })
}

/// `σ(μ)`, `μ₀` and the derived constants in one call.
///
/// # Safety
/// `cone` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn hc_constants(cone: *const HcCone, mu: f64, levels: usize, out: *mut HcConstants) -> HcStatus {
    guard(|| {
        let cone = cone.as_ref().ok_or_else(|| null("cone"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mu0 = mu0_compute(&cone.0, levels).map_err(fail)?.mu0;
        let sigma = sigma_of_mu(&cone.0, mu, levels).map_err(fail)?.sigma;
        let c = derive_constants(cone.0.dim(), sigma, mu, mu0).map_err(fail)?;
        write_out(
            out,
            HcConstants {
                n: c.n,
                mu: c.mu,
                mu0: c.mu0,
                sigma: c.sigma,
                gamma_plus: c.gamma_plus,
                gamma_minus: c.gamma_minus,
                lambda: c.lambda,
            },
        )
    })
}

/// Classification of the half-space weight with exponents `alphas[0..n]`.
///
/// # Safety
/// `alphas` must point to `n` readable doubles and `out` be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn hc_ftt_classify(alphas: *const f64, n: usize, out: *mut HcFttClass) -> HcStatus {
    guard(|| {
        if alphas.is_null() {
            return Err(null("alphas"));
        }
        let a = std::slice::from_raw_parts(alphas, n);
        let class = match ftt_derive(n, a).map_err(fail)?.classify() {
            FttClass::Critical => HcFttClass::Critical,
            FttClass::Subcritical => HcFttClass::Subcritical,
            FttClass::CriticalConjectured => HcFttClass::CriticalConjectured,
        };
        write_out(out, class)
    })
}

/// Largest finite-difference residual `|Δψ/ψ + V|/V` over `samples` seeded
/// points.
///
/// # Safety
/// `alphas` must point to `n` readable doubles and `out` be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn hc_ftt_residual(alphas: *const f64, n: usize, samples: usize, seed: u64, out: *mut f64) -> HcStatus {
    guard(|| {
        if alphas.is_null() {
            return Err(null("alphas"));
        }
        let a = std::slice::from_raw_parts(alphas, n);
        let levels = 8;
        let s = ftt_summary(n, a, samples, levels, seed).map_err(fail)?;
        write_out(out, s.residual.fd_residual)
    })
}

/// Runs the pipeline on a TOML run file and returns the report body as a
/// JSON string, to be released with [`hc_string_free`].
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` valid for a pointer
/// write.
#[no_mangle]
pub unsafe extern "C" fn hc_run_report(config: *const c_char, out: *mut *mut c_char) -> HcStatus {
    guard(|| {
        if config.is_null() {
            return Err(null("config"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(config).to_str().map_err(|_| {
            set_error("config is not UTF-8");
            HcStatus::Config
        })?;
        let cfg = parse_config(text).map_err(fail)?;
        let json = body_json(&run_pipeline(&cfg)).map_err(fail)?;
        let c = CString::new(json).map_err(|_| {
            set_error("report contains a NUL byte");
            HcStatus::Other
        })?;
        out.write(c.into_raw());
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
