use std::ffi::{CStr, CString};
use std::ptr;

use sic_ffi::*;

fn last_error() -> String {
    let p = sic_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn d3_fiducial() -> Vec<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![0.0, 0.0, s, 0.0, -s, 0.0]
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/sic.h")).unwrap();
    for name in [
        "sic_last_error_message",
        "sic_pec_order",
        "sic_welch_functional",
        "sic_welch_gradient",
        "sic_verify",
        "sic_stabiliser_order",
        "sic_search_config_new",
        "sic_search_config_free",
        "sic_search_config_set_trials",
        "sic_search_config_set_seed",
        "sic_search_config_set_workers",
        "sic_search_config_set_symmetry",
        "sic_search_run",
        "sic_search_results_count",
        "sic_search_results_get",
        "sic_search_results_free",
        "typedef struct SicSearchConfig SicSearchConfig",
        "SIC_STATUS_NOT_FOUND = 4",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

#[test]
fn pec_order() {
    let mut n = 0u64;
    assert_eq!(unsafe { sic_pec_order(5, &mut n) }, SicStatus::Ok);
    assert_eq!(n, 6000);
    assert_eq!(unsafe { sic_pec_order(0, &mut n) }, SicStatus::InvalidArgument);
    assert!(last_error().contains("invalid dimension"));
    assert_eq!(unsafe { sic_pec_order(5, ptr::null_mut()) }, SicStatus::NullPointer);
}

#[test]
fn functional_gradient_and_verify() {
    let v = d3_fiducial();
    let mut f = 1.0;
    assert_eq!(unsafe { sic_welch_functional(v.as_ptr(), 3, &mut f) }, SicStatus::Ok);
    assert!(f.abs() < 1e-14);
    let mut g = vec![1.0; 6];
    assert_eq!(unsafe { sic_welch_gradient(v.as_ptr(), 3, g.as_mut_ptr()) }, SicStatus::Ok);
    assert!(g.iter().all(|x| x.abs() < 1e-12));

    let (mut dev, mut pass) = (1.0, false);
    assert_eq!(unsafe { sic_verify(v.as_ptr(), 3, 1e-8, &mut dev, &mut pass) }, SicStatus::Ok);
    assert!(pass && dev < 1e-14);
    let basis = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    assert_eq!(unsafe { sic_verify(basis.as_ptr(), 3, 1e-8, &mut dev, &mut pass) }, SicStatus::Ok);
    assert!(!pass && (dev - 0.75).abs() < 1e-12);

    assert_eq!(unsafe { sic_welch_functional(ptr::null(), 3, &mut f) }, SicStatus::NullPointer);
    assert_eq!(unsafe { sic_welch_functional(v.as_ptr(), 1, &mut f) }, SicStatus::InvalidArgument);
}

#[test]
fn stabiliser_order_and_capacity() {
    let v = d3_fiducial();
    let mut n = 0u64;
    assert_eq!(unsafe { sic_stabiliser_order(v.as_ptr(), 3, 1e-7, &mut n) }, SicStatus::Ok);
    assert!(n > 1 && 432 % n == 0);
    let big = vec![0.25; 26];
    assert_eq!(unsafe { sic_stabiliser_order(big.as_ptr(), 13, 1e-7, &mut n) }, SicStatus::Capacity);
}

#[test]
fn search_round_trip() {
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(sic_search_config_new(4, &mut cfg), SicStatus::Ok);
        assert_eq!(sic_search_config_set_trials(cfg, 6), SicStatus::Ok);
        assert_eq!(sic_search_config_set_seed(cfg, 1), SicStatus::Ok);
        assert_eq!(sic_search_config_set_workers(cfg, 2), SicStatus::Ok);
        let fz = CString::new("FZ").unwrap();
        assert_eq!(sic_search_config_set_symmetry(cfg, fz.as_ptr(), 0), SicStatus::Ok);
        let bogus = CString::new("fq").unwrap();
        assert_eq!(sic_search_config_set_symmetry(cfg, bogus.as_ptr(), 0), SicStatus::InvalidArgument);

        let mut res = ptr::null_mut();
        assert_eq!(sic_search_run(cfg, &mut res), SicStatus::Ok);
        assert_eq!(sic_search_results_count(res), 6);
        let mut found = 0;
        for i in 0..6 {
            let mut v = [0.0; 8];
            let (mut trial, mut gap, mut fid) = (0u64, 0.0, false);
            assert_eq!(
                sic_search_results_get(res, i, v.as_mut_ptr(), 8, &mut trial, &mut gap, &mut fid),
                SicStatus::Ok
            );
            assert_eq!(trial, i as u64);
            if fid {
                found += 1;
                let (mut dev, mut pass) = (0.0, false);
                assert_eq!(sic_verify(v.as_ptr(), 4, 1e-8, &mut dev, &mut pass), SicStatus::Ok);
                assert!(pass, "trial {i} dev {dev}");
            }
        }
        assert!(found > 0);
        let mut small = [0.0; 4];
        assert_eq!(
            sic_search_results_get(res, 0, small.as_mut_ptr(), 4, ptr::null_mut(), ptr::null_mut(), ptr::null_mut()),
            SicStatus::InvalidArgument
        );
        assert_eq!(
            sic_search_results_get(res, 6, small.as_mut_ptr(), 8, ptr::null_mut(), ptr::null_mut(), ptr::null_mut()),
            SicStatus::InvalidArgument
        );
        sic_search_results_free(res);
        sic_search_config_free(cfg);
        assert_eq!(sic_search_results_count(ptr::null()), 0);
        sic_search_config_free(ptr::null_mut());
    }
}

#[test]
fn search_without_hits_reports_not_found() {
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(sic_search_config_new(6, &mut cfg), SicStatus::Ok);
        assert_eq!(sic_search_config_set_trials(cfg, 0), SicStatus::Ok);
        let mut res = ptr::null_mut();
        let status = sic_search_run(cfg, &mut res);
        assert_eq!(status, SicStatus::InvalidArgument, "{}", last_error());
        assert!(res.is_null());
        sic_search_config_free(cfg);
    }
}
