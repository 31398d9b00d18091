//! C interface to qkdlab.
//!
//! Every function returns a [`QkdStatus`]; results come back through out
//! pointers. On failure the message is kept per thread and can be fetched
//! with [`qkd_last_error_message`]. Handles are opaque and must be released
//! with their `_free` function; strings returned by the library are released
//! with [`qkd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qkdlab::analysis::{
    crossing_point, info_report, symmetric_point, thresholds, LogBase, ProtocolPreset,
};
use qkdlab::cloner::{closed_form_report, ClonerParams};
use qkdlab::sim::{run_session, Channel, SimConfig, SimResult, N_BASES};
use qkdlab::QkdError;

pub const QKD_PRESET_3DEB: u32 = 0;
pub const QKD_PRESET_UNIVERSAL: u32 = 1;
pub const QKD_PRESET_2MUB: u32 = 2;
pub const QKD_PRESET_QUBIT: u32 = 3;

pub const QKD_LOG_BASE_2: u32 = 0;
pub const QKD_LOG_BASE_3: u32 = 1;
pub const QKD_LOG_BASE_E: u32 = 2;

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QkdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The optimizer did not converge or found no crossing.
    Numerical = 3,
    /// A Rust panic was caught at the boundary.
    Panic = 4,
}

/// Cloner of the (v, x, y, z) family.
pub struct QkdCloner(ClonerParams);

/// Simulation settings.
pub struct QkdSimConfig(SimConfig);

/// Outcome of one simulated session.
pub struct QkdSimResult(SimResult);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct QkdInfoReport {
    pub f_a: f64,
    pub f_b: f64,
    pub d_a1: f64,
    pub d_a2: f64,
    pub d_b1: f64,
    pub d_b2: f64,
    /// NaN when F_A < 1/3.
    pub i_ab: f64,
    /// NaN unless y = z.
    pub i_ae: f64,
    pub r_bound: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct QkdCrossing {
    pub f_a_star: f64,
    pub error_rate: f64,
    pub i_ab: f64,
    pub i_ae: f64,
    pub residual: f64,
    /// Free parameters of the preset, first `n_params` used.
    pub params: [f64; 4],
    pub n_params: u32,
    pub iterations: u32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct QkdSymmetric {
    pub fidelity: f64,
    pub v: f64,
    pub x: f64,
    pub y: f64,
    pub f_a: f64,
    pub f_b: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct QkdThresholds {
    pub visibility_threshold: f64,
    pub bell_fidelity_threshold: f64,
    pub qubit_threshold: f64,
    pub reported_security_threshold: f64,
    pub reference_visibility: f64,
    pub reference_visibility_fidelity: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct QkdSimSummary {
    pub rounds: u64,
    pub seed: u64,
    pub sifted_count: u64,
    pub sifted_fraction: f64,
    /// Zero when nothing was sifted; `qber` is then NaN.
    pub has_qber: u8,
    pub qber: f64,
    pub qber_std_error: f64,
    /// Set for cloning attacks.
    pub has_eve_information: u8,
    pub empirical_i_ae: f64,
    /// `P(a = b | i, j)`, NaN for pairs never drawn.
    pub basis_correlation: [[f64; 4]; 4],
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("error message contained NUL").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: QkdStatus, msg: impl Into<Vec<u8>>) -> QkdStatus {
    set_error(msg);
    status
}

fn from_error(e: QkdError) -> QkdStatus {
    let status = if e.is_numerical() {
        QkdStatus::Numerical
    } else {
        QkdStatus::InvalidArgument
    };
    fail(status, e.to_string())
}

/// Clears the last error, runs `f`, and turns panics into [`QkdStatus::Panic`].
fn guard(f: impl FnOnce() -> QkdStatus) -> QkdStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(QkdStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn preset(code: u32) -> Result<ProtocolPreset, QkdStatus> {
    match code {
        QKD_PRESET_3DEB => Ok(ProtocolPreset::ThreeDeb),
        QKD_PRESET_UNIVERSAL => Ok(ProtocolPreset::UniversalQutrit),
        QKD_PRESET_2MUB => Ok(ProtocolPreset::TwoMubQutrit),
        QKD_PRESET_QUBIT => Ok(ProtocolPreset::QubitPhaseCovariant),
        _ => Err(fail(QkdStatus::InvalidArgument, format!("unknown preset code {code}"))),
    }
}

fn log_base(code: u32) -> Result<LogBase, QkdStatus> {
    match code {
        QKD_LOG_BASE_2 => Ok(LogBase::Two),
        QKD_LOG_BASE_3 => Ok(LogBase::Three),
        QKD_LOG_BASE_E => Ok(LogBase::E),
        _ => Err(fail(QkdStatus::InvalidArgument, format!("unknown log base code {code}"))),
    }
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! try_qkd {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return from_error(e),
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(QkdStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Library version as a static NUL-terminated string. Do not free.
#[no_mangle]
pub extern "C" fn qkd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the calling thread's last error message, or NULL if the last
/// call succeeded. Release with [`qkd_string_free`].
#[no_mangle]
pub extern "C" fn qkd_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn qkd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a cloner. With `normalize` nonzero the parameters are rescaled
/// to unit norm; otherwise they must already be normalized within 1e-6.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qkd_cloner_new(v: f64, x: f64, y: f64, z: f64, normalize: u8, out: *mut *mut QkdCloner) -> QkdStatus {
    guard(|| {
        non_null!(out);
        let p = ClonerParams::new(v, x, y, z);
        let p = if normalize != 0 {
            try_qkd!(p.normalized())
        } else {
            try_qkd!(qkdlab::cloner::phi_cloner_matrix(&p, false));
            try_qkd!(p.normalized())
        };
        *out = Box::into_raw(Box::new(QkdCloner(p)));
        QkdStatus::Ok
    })
}

/// # Safety
/// `cloner` must come from [`qkd_cloner_new`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn qkd_cloner_free(cloner: *mut QkdCloner) {
    if !cloner.is_null() {
        drop(Box::from_raw(cloner));
    }
}

/// Writes the normalized parameters of a cloner.
///
/// # Safety
/// `cloner` must be a live handle and `out` valid for 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn qkd_cloner_params(cloner: *const QkdCloner, out: *mut f64) -> QkdStatus {
    guard(|| {
        non_null!(cloner, out);
        let p = (*cloner).0;
        for (i, v) in [p.v, p.x, p.y, p.z].into_iter().enumerate() {
            *out.add(i) = v;
        }
        QkdStatus::Ok
    })
}

/// Fidelities, disturbances and information figures of a cloner.
///
/// # Safety
/// `cloner` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qkd_cloner_report(cloner: *const QkdCloner, base: u32, out: *mut QkdInfoReport) -> QkdStatus {
    guard(|| {
        non_null!(cloner, out);
        let base = try_status!(log_base(base));
        let p = (*cloner).0;
        let fid = closed_form_report(&p);
        let mut r = QkdInfoReport {
            f_a: fid.f_a,
            f_b: fid.f_b,
            d_a1: fid.d_a1,
            d_a2: fid.d_a2,
            d_b1: fid.d_b1,
            d_b2: fid.d_b2,
            i_ab: f64::NAN,
            i_ae: f64::NAN,
            r_bound: f64::NAN,
        };
        if let Ok(info) = info_report(&p, base) {
            r.i_ab = info.i_ab;
            r.i_ae = info.i_ae;
            r.r_bound = info.r_bound;
        } else if let Ok(i_ae) = qkdlab::analysis::eve_information(&p, base) {
            r.i_ae = i_ae;
        }
        *out = r;
        QkdStatus::Ok
    })
}

/// Crossing point of Bob's and Eve's information for a preset.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qkd_crossing(preset_code: u32, base: u32, out: *mut QkdCrossing) -> QkdStatus {
    guard(|| {
        non_null!(out);
        let p = try_status!(preset(preset_code));
        let b = try_status!(log_base(base));
        let r = try_qkd!(crossing_point(p, b));
        let mut params = [0.0; 4];
        for (dst, src) in params.iter_mut().zip(&r.param_vector) {
            *dst = *src;
        }
        *out = QkdCrossing {
            f_a_star: r.f_a_star,
            error_rate: r.error_rate,
            i_ab: r.i_ab,
            i_ae: r.i_ae,
            residual: r.residual,
            params,
            n_params: r.param_vector.len() as u32,
            iterations: r.iterations as u32,
        };
        QkdStatus::Ok
    })
}

/// Cloner with equal fidelities for Bob and Eve (3DEB preset only).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qkd_symmetric_point(preset_code: u32, out: *mut QkdSymmetric) -> QkdStatus {
    guard(|| {
        non_null!(out);
        let p = try_status!(preset(preset_code));
        let s = try_qkd!(symmetric_point(p));
        *out = QkdSymmetric {
            fidelity: s.fidelity,
            v: s.params.v,
            x: s.params.x,
            y: s.params.y,
            f_a: s.f_a,
            f_b: s.f_b,
        };
        QkdStatus::Ok
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qkd_thresholds(out: *mut QkdThresholds) -> QkdStatus {
    guard(|| {
        non_null!(out);
        let t = thresholds();
        *out = QkdThresholds {
            visibility_threshold: t.visibility_threshold,
            bell_fidelity_threshold: t.bell_fidelity_threshold,
            qubit_threshold: t.qubit_threshold,
            reported_security_threshold: t.reported_security_threshold,
            reference_visibility: t.reference_visibility,
            reference_visibility_fidelity: t.reference_visibility_fidelity,
        };
        QkdStatus::Ok
    })
}

/// New configuration with an ideal channel and uniform basis choice.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qkd_sim_config_new(rounds: u64, seed: u64, out: *mut *mut QkdSimConfig) -> QkdStatus {
    guard(|| {
        non_null!(out);
        let c = SimConfig::new(rounds, seed, Channel::Ideal);
        try_qkd!(c.validate());
        *out = Box::into_raw(Box::new(QkdSimConfig(c)));
        QkdStatus::Ok
    })
}

/// Parses a JSON configuration (same format as the command-line tool).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qkd_sim_config_from_json(json: *const c_char, out: *mut *mut QkdSimConfig) -> QkdStatus {
    guard(|| {
        non_null!(json, out);
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(QkdStatus::InvalidArgument, "configuration is not UTF-8");
        };
        let c: SimConfig = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(e) => return fail(QkdStatus::InvalidArgument, format!("bad configuration: {e}")),
        };
        try_qkd!(c.validate());
        *out = Box::into_raw(Box::new(QkdSimConfig(c)));
        QkdStatus::Ok
    })
}

/// # Safety
/// `config` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn qkd_sim_config_free(config: *mut QkdSimConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Sets the channel from its text form: `ideal`, `depolarizing:V`,
/// `clone:optimal` or `clone:v,x,y[,z]`.
///
/// # Safety
/// `config` must be a live handle and `channel` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qkd_sim_config_set_channel(config: *mut QkdSimConfig, channel: *const c_char) -> QkdStatus {
    guard(|| {
        non_null!(config, channel);
        let Ok(text) = CStr::from_ptr(channel).to_str() else {
            return fail(QkdStatus::InvalidArgument, "channel is not UTF-8");
        };
        let ch: Channel = try_qkd!(text.parse());
        (*config).0.channel = ch;
        QkdStatus::Ok
    })
}

/// Uses a cloner handle as Eve's attack.
///
/// # Safety
/// Both handles must be live.
#[no_mangle]
pub unsafe extern "C" fn qkd_sim_config_set_attack(config: *mut QkdSimConfig, cloner: *const QkdCloner) -> QkdStatus {
    guard(|| {
        non_null!(config, cloner);
        (*config).0.channel = Channel::CloningAttack { params: (*cloner).0 };
        QkdStatus::Ok
    })
}

/// Basis-choice weights, four per party. Either pointer may be NULL to keep
/// the current weights.
///
/// # Safety
/// `config` must be live; non-NULL weight pointers must hold 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn qkd_sim_config_set_weights(config: *mut QkdSimConfig, alice: *const f64, bob: *const f64) -> QkdStatus {
    guard(|| {
        non_null!(config);
        let mut c = (*config).0.clone();
        if !alice.is_null() {
            c.alice_weights.copy_from_slice(std::slice::from_raw_parts(alice, N_BASES));
        }
        if !bob.is_null() {
            c.bob_weights.copy_from_slice(std::slice::from_raw_parts(bob, N_BASES));
        }
        try_qkd!(c.validate());
        (*config).0 = c;
        QkdStatus::Ok
    })
}

/// Runs a session.
///
/// # Safety
/// `config` must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qkd_simulate(config: *const QkdSimConfig, out: *mut *mut QkdSimResult) -> QkdStatus {
    guard(|| {
        non_null!(config, out);
        let r = try_qkd!(run_session(&(*config).0));
        *out = Box::into_raw(Box::new(QkdSimResult(r)));
        QkdStatus::Ok
    })
}

/// # Safety
/// `result` must come from [`qkd_simulate`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn qkd_sim_result_free(result: *mut QkdSimResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qkd_sim_result_summary(result: *const QkdSimResult, out: *mut QkdSimSummary) -> QkdStatus {
    guard(|| {
        non_null!(result, out);
        let r = &(*result).0;
        let mut corr = [[f64::NAN; 4]; 4];
        for (dst, src) in corr.iter_mut().zip(&r.basis_correlation_matrix) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d = s.unwrap_or(f64::NAN);
            }
        }
        *out = QkdSimSummary {
            rounds: r.rounds,
            seed: r.seed,
            sifted_count: r.sifted_count,
            sifted_fraction: r.sifted_fraction,
            has_qber: r.qber.is_some() as u8,
            qber: r.qber.unwrap_or(f64::NAN),
            qber_std_error: r.qber_std_error.unwrap_or(f64::NAN),
            has_eve_information: r.empirical_i_ae.is_some() as u8,
            empirical_i_ae: r.empirical_i_ae.unwrap_or(f64::NAN),
            basis_correlation: corr,
        };
        QkdStatus::Ok
    })
}

/// Full result as JSON. Release with [`qkd_string_free`].
///
/// # Safety
/// `result` must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qkd_sim_result_to_json(result: *const QkdSimResult, out: *mut *mut c_char) -> QkdStatus {
    guard(|| {
        non_null!(result, out);
        let text = match serde_json::to_string(&(*result).0) {
            Ok(t) => t,
            Err(e) => return fail(QkdStatus::InvalidArgument, e.to_string()),
        };
        match CString::new(text) {
            Ok(c) => {
                *out = c.into_raw();
                QkdStatus::Ok
            }
            Err(e) => fail(QkdStatus::InvalidArgument, e.to_string()),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_status() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, QkdStatus::Panic);
        let msg = qkd_last_error_message();
        let text = unsafe { CStr::from_ptr(msg) }.to_str().unwrap().to_string();
        unsafe { qkd_string_free(msg) };
        assert_eq!(text, "panic: boom");
    }

    #[test]
    fn success_clears_error() {
        assert_eq!(fail(QkdStatus::InvalidArgument, "x"), QkdStatus::InvalidArgument);
        assert!(!qkd_last_error_message().is_null());
        let mut t = QkdThresholds::default();
        assert_eq!(unsafe { qkd_thresholds(&mut t) }, QkdStatus::Ok);
        assert!(qkd_last_error_message().is_null());
    }

    #[test]
    fn bad_codes_rejected() {
        assert!(preset(9).is_err());
        assert!(log_base(3).is_err());
        assert_eq!(preset(QKD_PRESET_2MUB).unwrap(), ProtocolPreset::TwoMubQutrit);
    }
}
