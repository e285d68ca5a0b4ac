use std::ffi::{c_char, c_int, c_void, CStr};
use std::ptr;

use adine_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    unsafe {
        adine_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn saddle() -> *mut AdineLandscape {
    let mut l = ptr::null_mut();
    assert_eq!(unsafe { adine_landscape_new_saddle2d(&mut l) }, AdineStatus::Ok);
    l
}

#[test]
fn cm_escapes_the_2d_saddle() {
    unsafe {
        let l = saddle();
        let mut opt = ptr::null_mut();
        assert_eq!(adine_optimizer_new_cm(0.01, 1.1, &mut opt), AdineStatus::Ok);
        let mut theta = [0.0; 2];
        assert_eq!(adine_landscape_default_start(l, theta.as_mut_ptr(), 2), AdineStatus::Ok);
        assert_eq!(theta, [1.0, 0.001]);
        let mut rec = AdineStepRecord::default();
        let mut f = 0.0;
        for _ in 0..200 {
            assert_eq!(adine_optimizer_step_landscape(opt, l, theta.as_mut_ptr(), 2, &mut rec), AdineStatus::Ok);
            assert_eq!(adine_landscape_eval(l, theta.as_ptr(), 2, &mut f, ptr::null_mut()), AdineStatus::Ok);
            if f < -10.0 {
                break;
            }
        }
        assert!(f < -10.0);
        assert_eq!(rec.has_wsl, 0);
        assert_eq!(rec.momentum, 1.1);
        adine_optimizer_free(opt);
        adine_landscape_free(l);
    }
}

#[test]
fn first_cm_step_matches_hand_computation() {
    unsafe {
        let l = saddle();
        let mut opt = ptr::null_mut();
        adine_optimizer_new_cm(0.01, 0.9, &mut opt);
        let mut theta = [1.0, 0.0];
        let mut rec = AdineStepRecord::default();
        adine_optimizer_step_landscape(opt, l, theta.as_mut_ptr(), 2, &mut rec);
        assert!((theta[0] - 0.98).abs() < 1e-15 && theta[1] == 0.0);
        let mut v = [0.0; 2];
        assert_eq!(adine_optimizer_velocity(opt, v.as_mut_ptr(), 2), AdineStatus::Ok);
        assert!((v[0] + 0.02).abs() < 1e-15);
        assert_eq!((rec.t, rec.loss), (1, 1.0));
        assert_eq!(adine_optimizer_reset(opt), AdineStatus::Ok);
        adine_optimizer_velocity(opt, v.as_mut_ptr(), 2);
        assert_eq!(v, [0.0, 0.0]);
        adine_optimizer_free(opt);
        adine_landscape_free(l);
    }
}

unsafe extern "C" fn bowl(_user: *mut c_void, x: *const f64, n: usize, f: *mut f64, g: *mut f64) -> c_int {
    let x = std::slice::from_raw_parts(x, n);
    *f = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
    if !g.is_null() {
        for (i, xi) in x.iter().enumerate() {
            *g.add(i) = 2.0 * xi;
        }
    }
    0
}

unsafe extern "C" fn failing(user: *mut c_void, _x: *const f64, _n: usize, _f: *mut f64, _g: *mut f64) -> c_int {
    *(user as *mut u32) += 1;
    7
}

#[test]
fn adine_on_a_callback_objective_tracks_wsl() {
    unsafe {
        let mut opt = ptr::null_mut();
        assert_eq!(adine_optimizer_new_adine(0.05, 0.9, 1.0001, 1.1, &mut opt), AdineStatus::Ok);
        let mut theta = [1.0, -2.0, 0.5];
        let mut rec = AdineStepRecord::default();
        let mut wsl = 0.0;
        for _ in 0..50 {
            assert_eq!(
                adine_optimizer_step_callback(opt, Some(bowl), ptr::null_mut(), theta.as_mut_ptr(), 3, &mut rec),
                AdineStatus::Ok
            );
            wsl = adine_wsl_update(wsl, rec.loss);
            assert_eq!(rec.has_wsl, 1);
            assert_eq!(rec.wsl, wsl);
        }
        assert!(theta.iter().all(|x| x.abs() < 1.0));
        adine_optimizer_free(opt);
    }
}

#[test]
fn callback_failure_is_reported_and_state_kept() {
    unsafe {
        let mut opt = ptr::null_mut();
        adine_optimizer_new_nag(0.1, 0.9, &mut opt);
        let mut calls = 0u32;
        let mut theta = [1.0, 1.0];
        let status = adine_optimizer_step_callback(
            opt,
            Some(failing),
            (&mut calls as *mut u32).cast(),
            theta.as_mut_ptr(),
            2,
            ptr::null_mut(),
        );
        assert_eq!(status, AdineStatus::Callback);
        assert_eq!(calls, 1);
        assert_eq!(theta, [1.0, 1.0]);
        assert!(last_error().contains("returned 7"));
        assert_eq!(
            adine_optimizer_step_callback(opt, None, ptr::null_mut(), theta.as_mut_ptr(), 2, ptr::null_mut()),
            AdineStatus::NullPointer
        );
        adine_optimizer_free(opt);
    }
}

#[test]
fn argument_errors_map_to_status_codes() {
    unsafe {
        let mut opt = ptr::null_mut();
        assert_eq!(adine_optimizer_new_adine(0.1, 1.2, 1.0001, 1.1, &mut opt), AdineStatus::InvalidArgument);
        assert!(opt.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(adine_optimizer_new_cm(0.1, 0.9, ptr::null_mut()), AdineStatus::NullPointer);

        let mut l = ptr::null_mut();
        assert_eq!(adine_landscape_new_quadratic(1, 0, &mut l), AdineStatus::InvalidArgument);
        assert_eq!(adine_landscape_new_quadratic(4, 0, &mut l), AdineStatus::Ok);
        assert_eq!(adine_landscape_dim(l), 4);
        adine_optimizer_new_cm(0.1, 0.9, &mut opt);
        let mut theta = [0.1; 3];
        assert_eq!(
            adine_optimizer_step_landscape(opt, l, theta.as_mut_ptr(), 3, ptr::null_mut()),
            AdineStatus::DimensionMismatch
        );
        let mut theta = [f64::NAN; 4];
        assert_eq!(
            adine_optimizer_step_landscape(opt, l, theta.as_mut_ptr(), 4, ptr::null_mut()),
            AdineStatus::NonFinite
        );
        adine_optimizer_free(opt);
        adine_landscape_free(l);
        adine_landscape_free(ptr::null_mut());
    }
}

#[test]
fn diverging_run_reports_diverged() {
    unsafe {
        let mut l = ptr::null_mut();
        adine_landscape_new_cubic(3, 1, &mut l);
        let mut opt = ptr::null_mut();
        adine_optimizer_new_cm(0.5, 1.1, &mut opt);
        let mut theta = [-1.0; 3];
        let mut status = AdineStatus::Ok;
        for _ in 0..200 {
            status = adine_optimizer_step_landscape(opt, l, theta.as_mut_ptr(), 3, ptr::null_mut());
            if status != AdineStatus::Ok {
                break;
            }
        }
        assert!(matches!(status, AdineStatus::Diverged | AdineStatus::NonFinite), "{status:?}");
        adine_optimizer_free(opt);
        adine_landscape_free(l);
    }
}

#[test]
fn helpers() {
    unsafe {
        let (mut eta, mut m) = (0.0, 0.0);
        assert_eq!(adine_polyak_optimal(1.0, 9.0, &mut eta, &mut m), AdineStatus::Ok);
        assert_eq!((eta, m), (0.25, 0.25));
        assert_eq!(adine_polyak_optimal(2.0, 1.0, &mut eta, &mut m), AdineStatus::InvalidArgument);
        let losses = [1.0, 1.0, 1.0];
        let mut w = 0.0;
        assert_eq!(adine_wsl_closed_form(losses.as_ptr(), 3, &mut w), AdineStatus::Ok);
        assert_eq!(w, 0.875);
        assert_eq!(adine_wsl_closed_form(losses.as_ptr(), 0, &mut w), AdineStatus::InvalidArgument);
        assert_eq!(adine_nesterov_momentum(0), 0.0);
        assert!((adine_nesterov_momentum(1) - 0.281753525).abs() < 1e-8);
        assert_eq!(CStr::from_ptr(adine_version()).to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn last_error_reports_required_size() {
    unsafe {
        adine_optimizer_new_cm(-1.0, 0.9, &mut ptr::null_mut());
        let need = adine_last_error(ptr::null_mut(), 0);
        let full = last_error();
        assert_eq!(need, full.len() + 1);
        let mut small = [0x7f as c_char; 4];
        adine_last_error(small.as_mut_ptr(), 4);
        assert_eq!(small[3], 0);
    }
}

#[test]
fn run_config_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/table1.json\0");
    let out = format!("{}\0", dir.path().join("out").display());
    unsafe {
        let status = adine_run_config(AdineRunKind::Race, cfg.as_ptr().cast(), out.as_ptr().cast());
        assert_eq!(status, AdineStatus::Ok, "{}", last_error());
        let missing = "/nonexistent.json\0";
        assert_eq!(adine_run_config(AdineRunKind::Race, missing.as_ptr().cast(), out.as_ptr().cast()), AdineStatus::Io);
        assert_eq!(adine_run_config(AdineRunKind::Race, ptr::null(), out.as_ptr().cast()), AdineStatus::NullPointer);
    }
    assert!(dir.path().join("out/summary.csv").exists());
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let include = root.join("include");
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = std::process::Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, "-I"])
            .arg(&include)
            .arg(root.join("examples/c/saddle.c"))
            .status();
        match status {
            Ok(s) => assert!(s.success(), "{compiler} rejected the header"),
            Err(e) => panic!("{compiler} not runnable: {e}"),
        }
    }
}
