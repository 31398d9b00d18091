use std::ffi::{CStr, CString};
use std::ptr;

use qkdlab_ffi::*;

fn last_error() -> Option<String> {
    let p = qkd_last_error_message();
    if p.is_null() {
        return None;
    }
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { qkd_string_free(p) };
    Some(s)
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(qkd_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn cloner_lifecycle() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { qkd_cloner_new(2.0, 0.0, 0.0, 0.0, 1, &mut c) }, QkdStatus::Ok);
    let mut p = [0.0; 4];
    assert_eq!(unsafe { qkd_cloner_params(c, p.as_mut_ptr()) }, QkdStatus::Ok);
    assert_eq!(p, [1.0, 0.0, 0.0, 0.0]);
    let mut r = QkdInfoReport::default();
    assert_eq!(unsafe { qkd_cloner_report(c, QKD_LOG_BASE_3, &mut r) }, QkdStatus::Ok);
    assert_eq!(r.f_a, 1.0);
    assert!((r.i_ab - 1.0).abs() < 1e-12);
    assert!(r.i_ae.abs() < 1e-12);
    unsafe { qkd_cloner_free(c) };
    unsafe { qkd_cloner_free(ptr::null_mut()) };
}

#[test]
fn unnormalized_cloner_rejected_without_flag() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { qkd_cloner_new(2.0, 0.0, 0.0, 0.0, 0, &mut c) }, QkdStatus::InvalidArgument);
    assert!(c.is_null());
    assert!(last_error().unwrap().contains("normalized"));
    assert_eq!(unsafe { qkd_cloner_new(0.0, 0.0, 0.0, 0.0, 1, &mut c) }, QkdStatus::InvalidArgument);
}

#[test]
fn asymmetric_cloner_reports_nan_eve_information() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { qkd_cloner_new(0.9, 0.2, 0.1, 0.3, 1, &mut c) }, QkdStatus::Ok);
    let mut r = QkdInfoReport::default();
    assert_eq!(unsafe { qkd_cloner_report(c, QKD_LOG_BASE_2, &mut r) }, QkdStatus::Ok);
    assert!(r.f_a > 0.0 && r.i_ae.is_nan());
    unsafe { qkd_cloner_free(c) };
}

#[test]
fn crossing_matches_library() {
    let mut out = QkdCrossing::default();
    assert_eq!(unsafe { qkd_crossing(QKD_PRESET_3DEB, QKD_LOG_BASE_2, &mut out) }, QkdStatus::Ok);
    let direct = qkdlab::analysis::crossing_point(
        qkdlab::analysis::ProtocolPreset::ThreeDeb,
        qkdlab::analysis::LogBase::Two,
    )
    .unwrap();
    assert_eq!(out.f_a_star, direct.f_a_star);
    assert_eq!(out.n_params as usize, direct.param_vector.len());
    assert_eq!(&out.params[..direct.param_vector.len()], &direct.param_vector[..]);
    assert!((out.f_a_star - 0.7753).abs() < 5e-4);

    assert_eq!(unsafe { qkd_crossing(17, QKD_LOG_BASE_2, &mut out) }, QkdStatus::InvalidArgument);
    assert!(last_error().unwrap().contains("preset"));
    assert_eq!(unsafe { qkd_crossing(QKD_PRESET_3DEB, QKD_LOG_BASE_2, ptr::null_mut()) }, QkdStatus::NullPointer);
}

#[test]
fn symmetric_point_only_for_3deb() {
    let mut s = QkdSymmetric::default();
    assert_eq!(unsafe { qkd_symmetric_point(QKD_PRESET_3DEB, &mut s) }, QkdStatus::Ok);
    assert!((s.fidelity - (5.0 + 17f64.sqrt()) / 12.0).abs() < 1e-4);
    assert_ne!(unsafe { qkd_symmetric_point(QKD_PRESET_QUBIT, &mut s) }, QkdStatus::Ok);
    assert!(last_error().is_some());
}

#[test]
fn simulation_round_trip() {
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { qkd_sim_config_new(5_000, 3, &mut cfg) }, QkdStatus::Ok);
    let ch = CString::new("depolarizing:0.5").unwrap();
    assert_eq!(unsafe { qkd_sim_config_set_channel(cfg, ch.as_ptr()) }, QkdStatus::Ok);
    let bad = CString::new("teleport").unwrap();
    assert_eq!(unsafe { qkd_sim_config_set_channel(cfg, bad.as_ptr()) }, QkdStatus::InvalidArgument);

    let mut res = ptr::null_mut();
    assert_eq!(unsafe { qkd_simulate(cfg, &mut res) }, QkdStatus::Ok);
    let mut s = QkdSimSummary::default();
    assert_eq!(unsafe { qkd_sim_result_summary(res, &mut s) }, QkdStatus::Ok);
    assert_eq!(s.has_qber, 1);
    assert_eq!(s.has_eve_information, 0);
    assert!(s.empirical_i_ae.is_nan());

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { qkd_sim_result_to_json(res, &mut json) }, QkdStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { qkd_string_free(json) };
    let direct = qkdlab::sim::run_session(&qkdlab::sim::SimConfig::new(
        5_000,
        3,
        qkdlab::sim::Channel::Depolarizing { visibility: 0.5 },
    ))
    .unwrap();
    assert_eq!(text, serde_json::to_string(&direct).unwrap());
    assert_eq!(s.sifted_count, direct.sifted_count);

    unsafe {
        qkd_sim_result_free(res);
        qkd_sim_config_free(cfg);
    }
}

#[test]
fn weights_and_json_configs() {
    let mut cfg = ptr::null_mut();
    let json = CString::new(r#"{"rounds": 1000, "seed": 4, "channel": {"kind": "ideal"}}"#).unwrap();
    assert_eq!(unsafe { qkd_sim_config_from_json(json.as_ptr(), &mut cfg) }, QkdStatus::Ok);

    let bad = [0.5, 0.5, 0.5, 0.5];
    assert_eq!(unsafe { qkd_sim_config_set_weights(cfg, bad.as_ptr(), ptr::null()) }, QkdStatus::InvalidArgument);
    let alice = [1.0, 0.0, 0.0, 0.0];
    let bob = [0.0, 1.0, 0.0, 0.0];
    assert_eq!(unsafe { qkd_sim_config_set_weights(cfg, alice.as_ptr(), bob.as_ptr()) }, QkdStatus::Ok);

    let mut res = ptr::null_mut();
    assert_eq!(unsafe { qkd_simulate(cfg, &mut res) }, QkdStatus::Ok);
    let mut s = QkdSimSummary::default();
    assert_eq!(unsafe { qkd_sim_result_summary(res, &mut s) }, QkdStatus::Ok);
    assert_eq!((s.sifted_count, s.has_qber), (0, 0));
    assert!(s.qber.is_nan());
    assert!(s.basis_correlation[1][0].is_nan());
    assert!((0.0..=1.0).contains(&s.basis_correlation[0][1]));
    unsafe {
        qkd_sim_result_free(res);
        qkd_sim_config_free(cfg);
    }

    let zero = CString::new(r#"{"rounds": 0, "channel": {"kind": "ideal"}}"#).unwrap();
    assert_eq!(unsafe { qkd_sim_config_from_json(zero.as_ptr(), &mut cfg) }, QkdStatus::InvalidArgument);
    let junk = CString::new("{").unwrap();
    assert_eq!(unsafe { qkd_sim_config_from_json(junk.as_ptr(), &mut cfg) }, QkdStatus::InvalidArgument);
    assert!(last_error().unwrap().starts_with("bad configuration"));
}

#[test]
fn errors_are_per_thread() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { qkd_cloner_new(0.0, 0.0, 0.0, 0.0, 1, &mut c) }, QkdStatus::InvalidArgument);
    std::thread::spawn(|| assert!(last_error().is_none())).join().unwrap();
    assert!(last_error().is_some());
}
