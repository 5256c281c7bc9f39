//! C interface to the pyrorisk engine.
//!
//! Every function returns a [`PyroStatus`]; on failure a description is
//! kept per thread and can be copied out with [`pyro_last_error`]. Networks
//! are opaque handles owned by the caller and released with
//! [`pyro_network_free`]. A loaded network is immutable, so one handle may
//! be used from several threads at once.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use chrono::NaiveDate;
use pyrorisk::cnn::{load_weights, CompiledNetwork, Shape3, Tensor3};
use pyrorisk::fusion::{fuse_binary, fuse_severity, fwi_to_danger, FusionConfig};
use pyrorisk::fwi::{step_day, FwiState, LatitudeBand, WeatherObservation};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PyroStatus {
    Ok = 0,
    NullPointer = 1,
    /// An argument is outside its documented domain.
    InvalidArgument = 2,
    /// The weight stream is malformed; see [`pyro_last_cnnw_code`].
    BadWeights = 3,
    /// Input or output buffer length does not match the network.
    ShapeMismatch = 4,
    /// Output buffer too small for the error message.
    BufferTooSmall = 5,
    Internal = 99,
}

thread_local! {
    static LAST_ERROR: RefCell<(String, u32)> = const { RefCell::new((String::new(), 0)) };
}

fn fail(status: PyroStatus, msg: impl Into<String>) -> PyroStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = (msg.into(), 0));
    status
}

fn guard(f: impl FnOnce() -> PyroStatus) -> PyroStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(PyroStatus::Internal, "internal panic"),
    }
}

/// Copies the last error message (NUL-terminated) into `buf`. Writes the
/// required size, terminator included, to `needed` when it is non-null.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn pyro_last_error(buf: *mut c_char, len: usize, needed: *mut usize) -> PyroStatus {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.0.as_bytes();
        if !needed.is_null() {
            *needed = bytes.len() + 1;
        }
        if buf.is_null() || len < bytes.len() + 1 {
            return PyroStatus::BufferTooSmall;
        }
        std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, bytes.len());
        *buf.add(bytes.len()) = 0;
        PyroStatus::Ok
    })
}

/// CNNW error code (1 to 7) behind the last [`PyroStatus::BadWeights`], or 0.
#[no_mangle]
pub extern "C" fn pyro_last_cnnw_code() -> u32 {
    LAST_ERROR.with(|e| e.borrow().1)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pyro_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}

/// Opaque compiled network.
pub struct PyroNetwork {
    inner: CompiledNetwork,
}

/// Parses CNNW bytes and compiles the network for `height × width ×
/// channels` inputs.
///
/// # Safety
/// `bytes` must be valid for `len` bytes; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pyro_network_load(
    bytes: *const u8,
    len: usize,
    height: u32,
    width: u32,
    channels: u32,
    out: *mut *mut PyroNetwork,
) -> PyroStatus {
    guard(|| {
        if bytes.is_null() || out.is_null() {
            return fail(PyroStatus::NullPointer, "null argument");
        }
        let data = std::slice::from_raw_parts(bytes, len);
        let net = match load_weights(data) {
            Ok(n) => n,
            Err(e) => {
                let code = e.code();
                LAST_ERROR.with(|l| *l.borrow_mut() = (e.to_string(), code));
                return PyroStatus::BadWeights;
            }
        };
        match net.compile(Shape3::new(height as usize, width as usize, channels as usize)) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(PyroNetwork { inner }));
                PyroStatus::Ok
            }
            Err(e) => fail(PyroStatus::ShapeMismatch, e.to_string()),
        }
    })
}

/// # Safety
/// `net` must come from [`pyro_network_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pyro_network_free(net: *mut PyroNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// # Safety
/// `net` must be a live handle; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pyro_network_info(
    net: *const PyroNetwork,
    num_classes: *mut u32,
    total_params: *mut u64,
    trainable_params: *mut u64,
) -> PyroStatus {
    guard(|| {
        if net.is_null() || num_classes.is_null() || total_params.is_null() || trainable_params.is_null() {
            return fail(PyroStatus::NullPointer, "null argument");
        }
        let inner = &(*net).inner;
        let p = inner.network().count_params();
        *num_classes = inner.labels().len() as u32;
        *total_params = p.total as u64;
        *trainable_params = p.trainable as u64;
        PyroStatus::Ok
    })
}

/// Runs one input (row, col, channel order, values in `[0, 1]`) and writes
/// the class probabilities and the burn probability.
///
/// # Safety
/// `input` must hold `input_len` floats and `probs` `probs_len` floats;
/// `p_burn` may be null.
#[no_mangle]
pub unsafe extern "C" fn pyro_network_forward(
    net: *const PyroNetwork,
    input: *const f32,
    input_len: usize,
    probs: *mut f32,
    probs_len: usize,
    p_burn: *mut f64,
) -> PyroStatus {
    guard(|| {
        if net.is_null() || input.is_null() || probs.is_null() {
            return fail(PyroStatus::NullPointer, "null argument");
        }
        let inner = &(*net).inner;
        let shape = inner.input_shape();
        if input_len != shape.len() {
            return fail(PyroStatus::ShapeMismatch, format!("input has {input_len} values, network expects {}", shape.len()));
        }
        let tensor = match Tensor3::new(shape, std::slice::from_raw_parts(input, input_len).to_vec()) {
            Ok(t) => t,
            Err(e) => return fail(PyroStatus::InvalidArgument, e.to_string()),
        };
        let scores = match inner.forward(&tensor) {
            Ok(s) => s,
            Err(e) => return fail(PyroStatus::InvalidArgument, e.to_string()),
        };
        if probs_len != scores.probabilities.len() {
            return fail(
                PyroStatus::ShapeMismatch,
                format!("output buffer holds {probs_len}, network has {} classes", scores.probabilities.len()),
            );
        }
        std::slice::from_raw_parts_mut(probs, probs_len).copy_from_slice(&scores.probabilities);
        if !p_burn.is_null() {
            *p_burn = scores.p_burn();
        }
        PyroStatus::Ok
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PyroWeather {
    pub year: i32,
    pub month: u32,
    pub day: u32,
    pub temp_c: f64,
    pub rh_pct: f64,
    pub wind_kmh: f64,
    pub rain_mm: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PyroFwiState {
    pub ffmc: f64,
    pub dmc: f64,
    pub dc: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PyroFwiReport {
    pub ffmc: f64,
    pub dmc: f64,
    pub dc: f64,
    pub isi: f64,
    pub bui: f64,
    pub fwi: f64,
}

/// Start-up moisture codes (85, 6, 15).
#[no_mangle]
pub extern "C" fn pyro_fwi_default_state() -> PyroFwiState {
    let s = FwiState::default();
    PyroFwiState {
        ffmc: s.ffmc,
        dmc: s.dmc,
        dc: s.dc,
    }
}

/// Advances the moisture codes by one day at `latitude`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pyro_fwi_step(
    state: *const PyroFwiState,
    weather: *const PyroWeather,
    latitude: f64,
    out: *mut PyroFwiReport,
) -> PyroStatus {
    guard(|| {
        if state.is_null() || weather.is_null() || out.is_null() {
            return fail(PyroStatus::NullPointer, "null argument");
        }
        let (s, w) = (*state, *weather);
        let Some(date) = NaiveDate::from_ymd_opt(w.year, w.month, w.day) else {
            return fail(PyroStatus::InvalidArgument, format!("invalid date {}-{}-{}", w.year, w.month, w.day));
        };
        let result = LatitudeBand::from_latitude(latitude).and_then(|band| {
            let obs = WeatherObservation::new(date, w.temp_c, w.rh_pct, w.wind_kmh, w.rain_mm)?;
            step_day(
                &FwiState {
                    ffmc: s.ffmc,
                    dmc: s.dmc,
                    dc: s.dc,
                },
                &obs,
                band,
            )
        });
        match result {
            Ok(r) => {
                *out = PyroFwiReport {
                    ffmc: r.state.ffmc,
                    dmc: r.state.dmc,
                    dc: r.state.dc,
                    isi: r.isi,
                    bui: r.bui,
                    fwi: r.fwi,
                };
                PyroStatus::Ok
            }
            Err(e) => fail(PyroStatus::InvalidArgument, e.to_string()),
        }
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PyroFusionConfig {
    pub thresholds: [f64; 5],
    pub gamma: f64,
    pub tau: f64,
}

impl From<PyroFusionConfig> for FusionConfig {
    fn from(c: PyroFusionConfig) -> Self {
        FusionConfig {
            thresholds: c.thresholds,
            gamma: c.gamma,
            tau: c.tau,
        }
    }
}

#[no_mangle]
pub extern "C" fn pyro_fusion_default() -> PyroFusionConfig {
    let c = FusionConfig::default();
    PyroFusionConfig {
        thresholds: c.thresholds,
        gamma: c.gamma,
        tau: c.tau,
    }
}

unsafe fn with_config(
    cfg: *const PyroFusionConfig,
    out: *mut u8,
    f: impl FnOnce(&FusionConfig) -> Result<u8, pyrorisk::fusion::FusionError>,
) -> PyroStatus {
    guard(|| {
        if cfg.is_null() || out.is_null() {
            return fail(PyroStatus::NullPointer, "null argument");
        }
        let cfg = FusionConfig::from(*cfg);
        if let Err(e) = cfg.validate() {
            return fail(PyroStatus::InvalidArgument, e.to_string());
        }
        match f(&cfg) {
            Ok(level) => {
                *out = level;
                PyroStatus::Ok
            }
            Err(e) => fail(PyroStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Base danger class 0 to 5 for an FWI value.
///
/// # Safety
/// `cfg` and `level` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pyro_fwi_to_danger(fwi: f64, cfg: *const PyroFusionConfig, level: *mut u8) -> PyroStatus {
    with_config(cfg, level, |c| fwi_to_danger(fwi, c))
}

/// `round(base · (1 − p_burn)^γ)` when `p_burn ≥ τ`, else `base`.
///
/// # Safety
/// `cfg` and `level` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pyro_fuse_binary(
    base: u8,
    p_burn: f64,
    cfg: *const PyroFusionConfig,
    level: *mut u8,
) -> PyroStatus {
    with_config(cfg, level, |c| fuse_binary(base, p_burn, c).map(|d| d.level))
}

/// `round(base · (1 − severity/5))`.
///
/// # Safety
/// `level` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pyro_fuse_severity(base: u8, severity: u8, level: *mut u8) -> PyroStatus {
    guard(|| {
        if level.is_null() {
            return fail(PyroStatus::NullPointer, "null argument");
        }
        match fuse_severity(base, severity) {
            Ok(d) => {
                *level = d.level;
                PyroStatus::Ok
            }
            Err(e) => fail(PyroStatus::InvalidArgument, e.to_string()),
        }
    })
}
