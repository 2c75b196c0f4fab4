use std::ffi::CStr;
use std::ptr;

use photonmix_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(pm_last_error_message()) }.to_string_lossy().into_owned()
}

fn mode(nx: u32, ny: u32, waist: f64, cx: f64) -> *mut PmMode {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { pm_mode_new(nx, ny, waist, cx, 0.0, &mut m) }, PmStatus::Ok);
    m
}

fn fock(n: u32) -> *mut PmLoState {
    let mut lo = ptr::null_mut();
    assert_eq!(unsafe { pm_lo_fock(n, &mut lo) }, PmStatus::Ok);
    lo
}

fn line(n: usize, lo: f64, hi: f64) -> Vec<PmPoint> {
    (0..n)
        .map(|i| PmPoint {
            x: lo + (hi - lo) * i as f64 / (n - 1) as f64,
            y: 0.0,
        })
        .collect()
}

const UNITS: PmUnits = PmUnits {
    eta: 1.0,
    d_s: 1.0,
    eps: 1.0,
};

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(pm_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn mode_eval_and_overlap() {
    let a = mode(0, 0, 1.0, 0.0);
    let b = mode(1, 0, 1.0, 0.0);
    let mut v = 0.0;
    unsafe {
        assert_eq!(pm_mode_eval(a, 0.0, 0.0, &mut v), PmStatus::Ok);
        assert!((v - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-15);
        assert_eq!(pm_mode_overlap(a, a, ptr::null(), &mut v), PmStatus::Ok);
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(pm_mode_overlap(a, b, ptr::null(), &mut v), PmStatus::Ok);
        assert!(v.abs() < 1e-12);
        pm_mode_free(a);
        pm_mode_free(b);
    }
}

#[test]
fn invalid_waist_sets_status_and_message() {
    let mut m = ptr::null_mut();
    let status = unsafe { pm_mode_new(0, 0, -1.0, 0.0, 0.0, &mut m) };
    assert_eq!(status, PmStatus::InvalidParameter);
    assert!(m.is_null());
    assert!(last_error().contains("waist"), "{}", last_error());
}

#[test]
fn null_arguments_are_reported() {
    let mut v = 0.0;
    assert_eq!(unsafe { pm_mode_eval(ptr::null(), 0.0, 0.0, &mut v) }, PmStatus::NullPointer);
    assert!(last_error().contains("mode"));
    let a = mode(0, 0, 1.0, 0.0);
    assert_eq!(unsafe { pm_mode_eval(a, 0.0, 0.0, ptr::null_mut()) }, PmStatus::NullPointer);
    unsafe {
        pm_mode_free(a);
        pm_mode_free(ptr::null_mut());
    }
    assert_eq!(unsafe { pm_measurement_len(ptr::null()) }, 0);
}

#[test]
fn success_clears_last_error() {
    let mut m = ptr::null_mut();
    unsafe { pm_mode_new(0, 0, 0.0, 0.0, 0.0, &mut m) };
    assert!(!last_error().is_empty());
    let a = mode(0, 0, 1.0, 0.0);
    assert!(last_error().is_empty());
    unsafe { pm_mode_free(a) };
}

#[test]
fn lo_moments() {
    let lo = fock(3);
    let mut coh = ptr::null_mut();
    let (mut n, mut n2) = (0.0, 0.0);
    unsafe {
        assert_eq!(pm_lo_moments(lo, &mut n, &mut n2), PmStatus::Ok);
        assert_eq!((n, n2), (3.0, 6.0));
        assert_eq!(pm_lo_coherent(1.0, 1.0, &mut coh), PmStatus::Ok);
        assert_eq!(pm_lo_moments(coh, &mut n, &mut n2), PmStatus::Ok);
        assert!((n - 2.0).abs() < 1e-15 && (n2 - 4.0).abs() < 1e-14);
        pm_lo_free(lo);
        pm_lo_free(coh);
    }
}

#[test]
fn beam_splitters() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let good = [-h, 0.0, 0.0, h, 0.0, h, -h, 0.0];
    let bad = [1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    let (mut a, mut b, mut c) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(pm_beam_splitter_new(good.as_ptr(), &mut a), PmStatus::Ok);
        assert_eq!(pm_beam_splitter_new(bad.as_ptr(), &mut b), PmStatus::InvalidParameter);
        assert!(b.is_null());
        assert_eq!(pm_beam_splitter_symmetric(&mut c), PmStatus::Ok);
        pm_beam_splitter_free(a);
        pm_beam_splitter_free(c);
    }
}

#[test]
fn point_correlation_matches_core() {
    let (l, p) = (mode(0, 0, 1.0, 0.0), mode(1, 0, 1.0, 0.0));
    let lo = fock(1);
    let mut bs = ptr::null_mut();
    let (r1, r2) = (PmPoint { x: 0.5, y: 0.0 }, PmPoint { x: -0.5, y: 0.0 });
    let (mut sym, mut gen) = (PmCorrelation::default(), PmCorrelation::default());
    let mut het = 0.0;
    unsafe {
        assert_eq!(pm_beam_splitter_symmetric(&mut bs), PmStatus::Ok);
        assert_eq!(pm_w2_point_symmetric(lo, l, p, r1, r2, &UNITS, &mut sym), PmStatus::Ok);
        assert_eq!(pm_w2_point_general(bs, lo, l, p, r1, r2, &UNITS, &mut gen), PmStatus::Ok);
        assert_eq!(pm_w2_heterodyne(l, p, r1, r2, 1.0, &mut het), PmStatus::Ok);
        assert_eq!(pm_w2_heterodyne(l, p, r1, r2, -1.0, &mut het), PmStatus::InvalidParameter);
        pm_beam_splitter_free(bs);
        pm_lo_free(lo);
        pm_mode_free(l);
        pm_mode_free(p);
    }
    let lm = photonmix::TransverseMode::centered(0, 0, 1.0).unwrap();
    let pm = photonmix::TransverseMode::centered(1, 0, 1.0).unwrap();
    let expected = 4.0 * (lm.eval(0.5, 0.0) * pm.eval(0.5, 0.0)).powi(2);
    assert_eq!(sym.lo_term, 0.0);
    assert!((sym.het_term - expected).abs() < 1e-15);
    assert!((sym.total_physical - gen.total_physical).abs() < 1e-15);
}

fn scan_grid() -> Vec<f64> {
    (0..49).map(|i| -12.0 + 0.5 * i as f64).collect()
}

#[test]
fn integrated_correlation() {
    let (l, p) = (mode(0, 0, 1.0, 0.0), mode(1, 0, 1.0, 0.0));
    let lo = fock(1);
    let win = |cx: f64| PmWindow {
        center_x: cx,
        center_y: 0.0,
        half_width_x: 5.0,
        half_width_y: 8.0,
    };
    let mut r = PmCorrelation::default();
    unsafe {
        assert_eq!(pm_w2_integrated(lo, l, p, win(-5.0), 1.0, win(5.0), 1.0, 1.0, &mut r), PmStatus::Ok);
        assert!(r.het_term > 0.0 && r.lo_term == 0.0, "{r:?}");
        assert_eq!(pm_w2_integrated(lo, l, p, win(-5.0), 0.0, win(5.0), 1.0, 1.0, &mut r), PmStatus::InvalidParameter);
        pm_lo_free(lo);
        pm_mode_free(l);
        pm_mode_free(p);
    }
}

#[test]
fn misalignment_and_hom_metrics() {
    let (l, p) = (mode(0, 0, 1.0, 0.0), mode(0, 0, 1.0, 0.0));
    let lo = fock(1);
    let xs = scan_grid();
    let mut totals = vec![0.0; xs.len()];
    let mut metrics = PmHomMetrics::default();
    unsafe {
        assert_eq!(
            pm_misalignment_scan(lo, l, p, 12.0, xs.as_ptr(), xs.len(), totals.as_mut_ptr()),
            PmStatus::Ok
        );
        assert_eq!(pm_hom_metrics(lo, l, p, 12.0, xs.as_ptr(), xs.len(), &mut metrics), PmStatus::Ok);
        assert!((metrics.visibility - 1.0).abs() < 1e-9, "{metrics:?}");
        assert_eq!(pm_hom_metrics(lo, l, p, 5.0, xs.as_ptr(), xs.len(), &mut metrics), PmStatus::InvalidInput);
        assert!(last_error().contains("plateau"), "{}", last_error());
        pm_lo_free(lo);
        pm_mode_free(l);
        pm_mode_free(p);
    }
    // A single-photon LO against an identical photon: V = 2n / (n(n-1) + 2n) = 1.
    let overlap = totals[24];
    let plateau = totals.iter().cloned().fold(0.0, f64::max);
    assert!(overlap.abs() < 1e-12);
    assert!((plateau - 2.0).abs() < 1e-6, "{plateau}");
}

#[test]
fn fock_zero_visibility_is_undefined() {
    let (l, p) = (mode(0, 0, 1.0, 0.0), mode(0, 0, 1.0, 0.0));
    let lo = fock(0);
    let xs = scan_grid();
    let mut metrics = PmHomMetrics::default();
    let status = unsafe { pm_hom_metrics(lo, l, p, 12.0, xs.as_ptr(), xs.len(), &mut metrics) };
    assert_eq!(status, PmStatus::UndefinedVisibility);
    unsafe {
        pm_lo_free(lo);
        pm_mode_free(l);
        pm_mode_free(p);
    }
}

#[test]
fn array_round_trip() {
    let (l, p) = (mode(0, 0, 1.0, 0.0), mode(1, 0, 1.0, 0.0));
    let lo = fock(1);
    let points = line(64, -3.0, 3.0);
    let reference = PmPoint { x: 0.7, y: 0.0 };
    let noise = PmNoise {
        kind: PmNoiseKind::None,
        sigma: 0.0,
        events: 0,
    };
    let truth = photonmix::TransverseMode::centered(1, 0, 1.0).unwrap();
    let anchor = truth.eval(0.7, 0.0);

    let mut meas = ptr::null_mut();
    let mut prof = ptr::null_mut();
    let mut amps = vec![0.0; points.len()];
    let (mut residual, mut anchor_value) = (0.0, 0.0);
    unsafe {
        assert_eq!(
            pm_synthesize_array(lo, l, p, reference, points.as_ptr(), points.len(), noise, 7, false, &mut meas),
            PmStatus::Ok
        );
        assert_eq!(pm_measurement_len(meas), 64);
        assert_eq!(pm_reconstruct(meas, l, &anchor, &mut prof), PmStatus::Ok);
        assert_eq!(pm_profile_len(prof), 64);
        assert_eq!(
            pm_profile_amplitudes(prof, amps.as_mut_ptr(), 10),
            PmStatus::BufferTooSmall
        );
        assert_eq!(pm_profile_amplitudes(prof, amps.as_mut_ptr(), amps.len()), PmStatus::Ok);
        assert_eq!(pm_profile_summary(prof, &mut residual, &mut anchor_value), PmStatus::Ok);
        pm_profile_free(prof);
        pm_measurement_free(meas);
        pm_lo_free(lo);
        pm_mode_free(l);
        pm_mode_free(p);
    }
    for (q, a) in points.iter().zip(&amps) {
        assert!((a - truth.eval(q.x, q.y)).abs() < 1e-6);
    }
    assert!(residual < 1e-9);
    assert_eq!(anchor_value, anchor);
}

#[test]
fn measurement_from_values() {
    let points = line(16, -2.0, 2.0);
    let truth = photonmix::TransverseMode::centered(1, 0, 1.0).unwrap();
    let lo = photonmix::TransverseMode::centered(0, 0, 1.0).unwrap();
    let r = (0.6, 0.0);
    let values: Vec<f64> = points
        .iter()
        .map(|q| {
            let g = lo.eval(r.0, r.1) * truth.eval(q.x, q.y) - lo.eval(q.x, q.y) * truth.eval(r.0, r.1);
            2.0 * g * g
        })
        .collect();
    let l = mode(0, 0, 1.0, 0.0);
    let mut meas = ptr::null_mut();
    let mut prof = ptr::null_mut();
    let mut copy = vec![0.0; values.len()];
    let mut amps = vec![0.0; values.len()];
    let anchor = truth.eval(r.0, r.1);
    unsafe {
        let rp = PmPoint { x: r.0, y: r.1 };
        assert_eq!(
            pm_measurement_new(rp, points.as_ptr(), values.as_ptr(), values.len(), 2.0, &mut meas),
            PmStatus::Ok
        );
        assert_eq!(pm_measurement_values(meas, copy.as_mut_ptr(), copy.len()), PmStatus::Ok);
        assert_eq!(pm_reconstruct(meas, l, &anchor, &mut prof), PmStatus::Ok);
        assert_eq!(pm_profile_amplitudes(prof, amps.as_mut_ptr(), amps.len()), PmStatus::Ok);
        pm_profile_free(prof);
        pm_measurement_free(meas);
        pm_mode_free(l);
    }
    assert_eq!(copy, values);
    for (q, a) in points.iter().zip(&amps) {
        assert!((a - truth.eval(q.x, q.y)).abs() < 1e-6);
    }
}

#[test]
fn degenerate_anchor_status() {
    let l = mode(1, 0, 1.0, 0.0);
    let points = line(8, -2.0, 2.0);
    let values = vec![0.1; points.len()];
    let origin = PmPoint { x: 0.0, y: 0.0 };
    let mut meas = ptr::null_mut();
    let mut prof = ptr::null_mut();
    let anchor = 1.0;
    unsafe {
        assert_eq!(
            pm_measurement_new(origin, points.as_ptr(), values.as_ptr(), values.len(), 1.0, &mut meas),
            PmStatus::Ok
        );
        assert_eq!(pm_reconstruct(meas, l, &anchor, &mut prof), PmStatus::DegenerateAnchor);
        assert!(prof.is_null());
        pm_measurement_free(meas);
        pm_mode_free(l);
    }
}
