use std::f64::consts::PI;
use std::ffi::{CStr, CString};
use std::ptr;

use tricap_ffi::*;

fn last_error() -> String {
    let mut needed = 0usize;
    unsafe {
        assert_eq!(tricap_last_error(ptr::null_mut(), 0, &mut needed), TricapStatus::Ok);
        let mut buf = vec![0 as std::ffi::c_char; needed];
        assert_eq!(tricap_last_error(buf.as_mut_ptr(), buf.len(), ptr::null_mut()), TricapStatus::Ok);
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn young_angles_through_the_c_interface() {
    let mut out = [0.0f64; 3];
    unsafe {
        assert_eq!(tricap_young_angles(1.0, 3f64.sqrt(), 2.0, out.as_mut_ptr()), TricapStatus::Ok);
    }
    let want = [PI / 2.0, 2.0 * PI / 3.0, 5.0 * PI / 6.0];
    for k in 0..3 {
        assert!((out[k] - want[k]).abs() < 1e-10);
    }
}

#[test]
fn spreading_tensions_are_reported() {
    let mut out = [0.0f64; 3];
    let status = unsafe { tricap_young_angles(3.0, 1.0, 1.0, out.as_mut_ptr()) };
    assert_eq!(status, TricapStatus::Spreading);
    assert!(!last_error().is_empty());
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        assert_eq!(tricap_young_angles(1.0, 1.0, 1.0, ptr::null_mut()), TricapStatus::NullPointer);
        assert!(last_error().contains("null"));
        let mut cfg = ptr::null_mut();
        assert_eq!(tricap_config_parse(ptr::null(), &mut cfg), TricapStatus::NullPointer);
        assert!(cfg.is_null());
        assert_eq!(tricap_phase_field_step(ptr::null_mut(), 1), TricapStatus::NullPointer);
        tricap_config_free(ptr::null_mut());
        tricap_profile_free(ptr::null_mut());
        tricap_phase_field_free(ptr::null_mut());
    }
}

#[test]
fn junction_profile_round_trip() {
    let mut p = std::mem::MaybeUninit::<TricapJunctionParams>::uninit();
    unsafe {
        assert_eq!(tricap_junction_default(p.as_mut_ptr()), TricapStatus::Ok);
        let mut p = p.assume_init();
        assert_eq!(p.beta_left, 1.0);
        assert_eq!(p.q_bdry, 0.5);
        p.n = 200;
        p.dt = 1e-5;
        let mut prof = ptr::null_mut();
        assert_eq!(tricap_junction_solve(&p, 0.01, &mut prof), TricapStatus::Ok);
        let mut len = 0;
        assert_eq!(tricap_profile_len(prof, &mut len), TricapStatus::Ok);
        assert!(len > 200);
        let (mut s, mut q) = (vec![0.0; len], vec![0.0; len]);
        assert_eq!(tricap_profile_copy(prof, s.as_mut_ptr(), q.as_mut_ptr(), len), TricapStatus::Ok);
        assert!((s[0] + p.half_length).abs() < 1e-12 && (s[len - 1] - p.half_length).abs() < 1e-12);
        assert!((q[0] - 0.5).abs() < 1e-12);
        assert!(q.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert_eq!(tricap_profile_copy(prof, s.as_mut_ptr(), q.as_mut_ptr(), 3), TricapStatus::BufferTooSmall);
        tricap_profile_free(prof);

        p.ramp_t1 = p.ramp_t0;
        let mut bad = ptr::null_mut();
        assert_eq!(tricap_junction_solve(&p, 0.01, &mut bad), TricapStatus::InvalidArgument);
        assert!(bad.is_null());
    }
}

#[test]
fn config_parse_manifest_and_errors() {
    let text = CString::new("experiment = young\nphysics.tensions = 1, sqrt3, 2\n").unwrap();
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(tricap_config_parse(text.as_ptr(), &mut cfg), TricapStatus::Ok);
        let mut needed = 0;
        assert_eq!(tricap_config_manifest(cfg, ptr::null_mut(), 0, &mut needed), TricapStatus::Ok);
        let mut small = vec![0 as std::ffi::c_char; 4];
        assert_eq!(tricap_config_manifest(cfg, small.as_mut_ptr(), small.len(), ptr::null_mut()), TricapStatus::BufferTooSmall);
        let mut buf = vec![0 as std::ffi::c_char; needed];
        assert_eq!(tricap_config_manifest(cfg, buf.as_mut_ptr(), buf.len(), ptr::null_mut()), TricapStatus::Ok);
        let manifest = CStr::from_ptr(buf.as_ptr()).to_str().unwrap().to_owned();
        assert!(manifest.contains("experiment = young"));

        let dir = std::env::temp_dir().join(format!("tricap-ffi-{}", std::process::id()));
        let cdir = CString::new(dir.to_str().unwrap()).unwrap();
        assert_eq!(tricap_run(cfg, cdir.as_ptr(), 0, 0), TricapStatus::Ok);
        assert!(dir.join("angles.csv").exists());
        let _ = std::fs::remove_dir_all(&dir);
        tricap_config_free(cfg);

        let bad = CString::new("experiment = hexagon\nphysics.nonsense = 3\n").unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(tricap_config_parse(bad.as_ptr(), &mut out), TricapStatus::Parse);
        assert!(out.is_null());
        assert!(last_error().contains("line 2"), "{}", last_error());
    }
}

#[test]
fn phase_field_lens_relaxes() {
    let tensions = [1.0, 1.0, 1.0];
    unsafe {
        let mut pf = ptr::null_mut();
        let status = tricap_phase_field_new_lens(-1.0, 1.0, -1.0, 1.0, 0.5, 0.2, tensions.as_ptr(), &mut pf);
        assert_eq!(status, TricapStatus::Ok, "{}", last_error());
        let (mut nx, mut ny, mut t) = (0, 0, -1.0);
        assert_eq!(tricap_phase_field_info(pf, &mut nx, &mut ny, &mut t), TricapStatus::Ok);
        assert_eq!((nx, ny, t), (40, 40, 0.0));
        let mut e0 = 0.0;
        assert_eq!(tricap_phase_field_energy(pf, &mut e0), TricapStatus::Ok);
        assert_eq!(tricap_phase_field_step(pf, 50), TricapStatus::Ok);
        let mut e1 = 0.0;
        assert_eq!(tricap_phase_field_energy(pf, &mut e1), TricapStatus::Ok);
        assert!(e1 < e0, "{e1} {e0}");
        let mut phi = vec![[0.0; 3]; nx * ny];
        let mut buf = vec![0.0; nx * ny];
        for k in 0..3u32 {
            assert_eq!(tricap_phase_field_copy(pf, k + 1, buf.as_mut_ptr(), buf.len()), TricapStatus::Ok);
            for (c, v) in buf.iter().enumerate() {
                phi[c][k as usize] = *v;
            }
        }
        assert!(phi.iter().all(|p| (p.iter().sum::<f64>() - 1.0).abs() < 1e-10));
        assert_eq!(tricap_phase_field_copy(pf, 4, buf.as_mut_ptr(), buf.len()), TricapStatus::InvalidArgument);
        let (mut a, mut j) = ([0.0; 3], [0.0; 2]);
        assert_eq!(tricap_phase_field_angles(pf, 0.5, 0.0, a.as_mut_ptr(), ptr::null_mut(), j.as_mut_ptr()), TricapStatus::Ok);
        assert!((a.iter().sum::<f64>() - 2.0 * PI).abs() < 1e-9);
        assert!(j[0] > 0.2 && j[0] < 0.8, "{j:?}");
        tricap_phase_field_free(pf);
    }
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/tricap.h")).unwrap();
    for name in [
        "TRICAP_H",
        "TRICAP_STATUS_OK",
        "TRICAP_STATUS_PANIC",
        "tricap_last_error",
        "tricap_young_angles",
        "tricap_junction_solve",
        "tricap_config_parse",
        "tricap_run",
        "tricap_phase_field_new_lens",
        "typedef struct TricapPhaseField TricapPhaseField",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
