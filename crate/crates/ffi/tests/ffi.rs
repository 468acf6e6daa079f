use std::ffi::{CStr, CString};
use std::ptr;

use temporal_lab_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = tl_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn preset(name: &str) -> *mut TlScenario {
    let mut sc = ptr::null_mut();
    assert_eq!(
        unsafe { tl_scenario_preset(c(name).as_ptr(), &mut sc) },
        TlStatus::Ok
    );
    sc
}

#[test]
fn tsirelson_preset_through_handles() {
    let sc = preset("tsirelson-qubit");
    let (mut dim, mut m, mut n) = (0, 0, 0);
    let mut corr = [0.0; 4];
    let mut p = [0.0; 4];
    unsafe {
        assert_eq!(
            tl_scenario_shape(sc, &mut dim, &mut m, &mut n),
            TlStatus::Ok
        );
        assert_eq!(
            tl_scenario_correlators(sc, corr.as_mut_ptr(), 4),
            TlStatus::Ok
        );
        assert_eq!(tl_scenario_joint(sc, 0, 0, p.as_mut_ptr()), TlStatus::Ok);
        assert_eq!(
            tl_scenario_correlators(sc, corr.as_mut_ptr(), 3),
            TlStatus::InvalidArgument
        );
        tl_scenario_free(sc);
    }
    assert_eq!((dim, m, n), (2, 2, 2));
    let chsh = corr[0] + corr[1] + corr[2] - corr[3];
    assert!((chsh.abs() - 8f64.sqrt()).abs() < 1e-9);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((p[0] + p[3] - p[1] - p[2] - corr[0]).abs() < 1e-12);

    let (mut quantum, mut classical, mut res) = (false, true, -1.0);
    unsafe {
        assert_eq!(
            tl_tsirelson_feasible(corr.as_ptr(), 2, 2, &mut quantum, &mut res),
            TlStatus::Ok
        );
        assert_eq!(
            tl_hv_correlator_feasible(corr.as_ptr(), 2, 2, &mut classical, ptr::null_mut()),
            TlStatus::Ok
        );
    }
    assert!(quantum && !classical);
    assert!((0.0..1e-6).contains(&res));
}

#[test]
fn pr_box_correlators() {
    let pr = [1.0, 1.0, 1.0, -1.0];
    let (mut quantum, mut classical) = (true, true);
    unsafe {
        assert_eq!(
            tl_tsirelson_feasible(pr.as_ptr(), 2, 2, &mut quantum, ptr::null_mut()),
            TlStatus::Ok
        );
        assert_eq!(
            tl_hv_correlator_feasible(pr.as_ptr(), 2, 2, &mut classical, ptr::null_mut()),
            TlStatus::Ok
        );
    }
    assert!(!quantum && !classical);
    let bad = [1.5, 0.0, 0.0, 0.0];
    let status =
        unsafe { tl_tsirelson_feasible(bad.as_ptr(), 2, 2, &mut quantum, ptr::null_mut()) };
    assert_eq!(status, TlStatus::InvalidArgument);
}

#[test]
fn json_round_trip() {
    let sc = preset("hardy-protocol");
    let mut json = ptr::null_mut();
    let mut back = ptr::null_mut();
    let (mut a, mut b) = ([0.0; 4], [0.0; 4]);
    unsafe {
        assert_eq!(tl_scenario_to_json(sc, &mut json), TlStatus::Ok);
        assert_eq!(tl_scenario_from_json(json, &mut back), TlStatus::Ok);
        tl_string_free(json);
        for k in 0..2 {
            for l in 0..2 {
                tl_scenario_joint(sc, k, l, a.as_mut_ptr());
                tl_scenario_joint(back, k, l, b.as_mut_ptr());
                assert_eq!(a, b);
            }
        }
        tl_scenario_free(sc);
        tl_scenario_free(back);
    }
}

#[test]
fn hardy_through_handles() {
    let sc = preset("hardy-protocol");
    let mut res = [1.0; 3];
    let (mut value, mut ok) = (0.0, false);
    unsafe {
        assert_eq!(
            tl_hardy_check(sc, res.as_mut_ptr(), &mut value, &mut ok),
            TlStatus::Ok
        );
        tl_scenario_free(sc);
    }
    assert!(ok && res.iter().all(|r| *r < 1e-12));
    assert!((value - 0.25).abs() < 1e-12);

    let mut best = ptr::null_mut();
    unsafe {
        assert_eq!(
            tl_hardy_max_temporal(2, 2, 7, &mut value, &mut best),
            TlStatus::Ok
        );
        assert!(!best.is_null());
        let mut again = 0.0;
        assert_eq!(
            tl_hardy_check(best, res.as_mut_ptr(), &mut again, ptr::null_mut()),
            TlStatus::Ok
        );
        tl_scenario_free(best);
        assert!((again - value).abs() < 1e-9);
        assert_eq!(
            tl_hardy_max_temporal(1, 2, 7, &mut value, ptr::null_mut()),
            TlStatus::InvalidArgument
        );
    }
    assert!((value - 0.25).abs() < 1e-4);
}

#[test]
fn tables_and_instruments() {
    let mut t = ptr::null_mut();
    let (mut feasible, mut residual, mut p) = (true, 1.0, 0.0);
    unsafe {
        assert_eq!(
            tl_table_preset(c("pr-box-table").as_ptr(), &mut t),
            TlStatus::Ok
        );
        assert_eq!(
            tl_table_hv_feasible(t, &mut feasible, ptr::null_mut()),
            TlStatus::Ok
        );
        assert_eq!(tl_table_round_trip(t, &mut residual), TlStatus::Ok);
        // outcome index 0 is -1
        assert_eq!(tl_table_get(t, 0, 1, 1, 1, &mut p), TlStatus::Ok);
        assert_eq!(
            tl_table_get(t, 2, 0, 0, 0, &mut p),
            TlStatus::InvalidArgument
        );
        tl_table_free(t);
    }
    assert!(!feasible);
    assert!(residual < 1e-10);

    let sc = preset("signal-protocol");
    unsafe {
        assert_eq!(tl_scenario_table(sc, &mut t), TlStatus::Ok);
        tl_scenario_free(sc);
        let mut json = ptr::null_mut();
        assert_eq!(tl_table_to_json(t, &mut json), TlStatus::Ok);
        tl_table_free(t);
        let mut back = ptr::null_mut();
        assert_eq!(tl_table_from_json(json, &mut back), TlStatus::Ok);
        tl_string_free(json);
        assert_eq!(tl_table_round_trip(back, &mut residual), TlStatus::Ok);
        tl_table_free(back);
    }
    assert!(residual < 1e-10);
}

#[test]
fn capacity() {
    let (mut bits, mut q) = (0.0, [0.0; 2]);
    let status = unsafe { tl_binary_channel_capacity(1.0, 0.5, &mut bits, q.as_mut_ptr()) };
    assert_eq!(status, TlStatus::Ok);
    assert!((bits - 0.321928).abs() < 1e-6);
    assert!((q[0] - 0.4).abs() < 1e-4 || (q[0] - 0.6).abs() < 1e-4);
    assert_eq!(
        unsafe { tl_binary_channel_capacity(1.5, 0.5, &mut bits, ptr::null_mut()) },
        TlStatus::InvalidArgument
    );
}

#[test]
fn errors_are_reported() {
    let mut sc = ptr::null_mut();
    unsafe {
        assert_eq!(
            tl_scenario_preset(c("nope").as_ptr(), &mut sc),
            TlStatus::UnknownPreset
        );
        assert!(last_error().contains("nope"));
        assert_eq!(
            tl_scenario_preset(c("pr-box-table").as_ptr(), &mut sc),
            TlStatus::InvalidArgument
        );
        assert_eq!(
            tl_scenario_from_json(c("{\"dim\": 2,\n oops}").as_ptr(), &mut sc),
            TlStatus::Parse
        );
        assert!(last_error().contains("line 2"));
        assert_eq!(
            tl_scenario_from_json(ptr::null(), &mut sc),
            TlStatus::NullPointer
        );
        assert!(sc.is_null());
        let mut dim = 0;
        assert_eq!(
            tl_scenario_shape(ptr::null(), &mut dim, &mut dim, &mut dim),
            TlStatus::NullPointer
        );
    }
    let sc = preset("tsirelson-qubit");
    assert!(tl_last_error().is_null());
    let mut p = [0.0; 4];
    unsafe {
        assert_eq!(
            tl_scenario_joint(sc, 5, 0, p.as_mut_ptr()),
            TlStatus::InvalidArgument
        );
        tl_scenario_free(sc);
    }
    let mut t = ptr::null_mut();
    // Alice's outcome follows Bob's later setting
    let signaling = r#"{"m":1,"n":2,"values":[[[[1,0]],[[0,0]]],[[[0,1]],[[0,0]]]]}"#;
    unsafe {
        assert_eq!(
            tl_table_from_json(c(signaling).as_ptr(), &mut t),
            TlStatus::Ok
        );
        let mut r = 0.0;
        assert_eq!(tl_table_round_trip(t, &mut r), TlStatus::BackwardSignaling);
        assert!(last_error().contains("signaling"));
        tl_table_free(t);
    }
    let version = unsafe { CStr::from_ptr(tl_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/temporal_lab.h"
    ))
    .unwrap();
    for name in [
        "tl_scenario_from_json",
        "tl_scenario_free",
        "tl_table_round_trip",
        "tl_last_error",
        "TL_STATUS_PANIC",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
