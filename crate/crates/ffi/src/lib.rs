//! C ABI for `photonmix`.
//!
//! Objects cross the boundary as opaque handles created by `pm_*_new`-style
//! constructors and released by the matching `pm_*_free`. Small values
//! (points, windows, units, results) are passed as `#[repr(C)]` structs.
//! Every fallible call returns a [`PmStatus`]; on failure a description is
//! available from [`pm_last_error_message`] on the same thread.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use photonmix::profiling::synthesize_array_with_pedestal;
use photonmix::{
    ArrayMeasurement, BeamSplitter, Complex64, CorrelationResult, Detector, Error, HomMetrics, LoState, NoiseSpec,
    Point, ReconstructedProfile, TransverseMode, Units, Window,
};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    InvalidInput = 3,
    Numerical = 4,
    UndefinedVisibility = 5,
    DegenerateAnchor = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

impl From<&Error> for PmStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter { .. } => PmStatus::InvalidParameter,
            Error::NumericalDomain(_) => PmStatus::Numerical,
            Error::UndefinedVisibility => PmStatus::UndefinedVisibility,
            Error::DegenerateAnchor(_) => PmStatus::DegenerateAnchor,
            Error::InvalidInput(_) | Error::Config { .. } | Error::Io(_) => PmStatus::InvalidInput,
        }
    }
}

/// Transverse Hermite-Gaussian mode.
pub struct PmMode(TransverseMode);
/// LO input state.
pub struct PmLoState(LoState);
/// Unitary 2x2 beam splitter.
pub struct PmBeamSplitter(BeamSplitter);
/// Detector-array measurement.
pub struct PmMeasurement(ArrayMeasurement);
/// Reconstructed photon profile.
pub struct PmProfile(ReconstructedProfile);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmPoint {
    pub x: f64,
    pub y: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmWindow {
    pub center_x: f64,
    pub center_y: f64,
    pub half_width_x: f64,
    pub half_width_y: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmUnits {
    pub eta: f64,
    pub d_s: f64,
    pub eps: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PmCorrelation {
    pub lo_term: f64,
    pub het_term: f64,
    pub total_reduced: f64,
    pub total_physical: f64,
    pub prefactor: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PmHomMetrics {
    pub visibility: f64,
    pub depth: f64,
    pub plateau: f64,
    pub overlap: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmNoiseKind {
    None = 0,
    Gaussian = 1,
    Counts = 2,
}

/// Noise model for synthesized array data. `sigma` is read for
/// `GAUSSIAN`, `events` for `COUNTS`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmNoise {
    pub kind: PmNoiseKind,
    pub sigma: f64,
    pub events: u64,
}

impl From<PmPoint> for Point {
    fn from(p: PmPoint) -> Self {
        Point::new(p.x, p.y)
    }
}

impl From<PmWindow> for Window {
    fn from(w: PmWindow) -> Self {
        Window {
            center_x: w.center_x,
            center_y: w.center_y,
            half_width_x: w.half_width_x,
            half_width_y: w.half_width_y,
        }
    }
}

impl From<PmUnits> for Units {
    fn from(u: PmUnits) -> Self {
        Units {
            eta: u.eta,
            d_s: u.d_s,
            eps: u.eps,
        }
    }
}

impl From<CorrelationResult> for PmCorrelation {
    fn from(r: CorrelationResult) -> Self {
        PmCorrelation {
            lo_term: r.lo_term,
            het_term: r.het_term,
            total_reduced: r.total_reduced,
            total_physical: r.total_physical,
            prefactor: r.prefactor,
        }
    }
}

impl From<HomMetrics> for PmHomMetrics {
    fn from(m: HomMetrics) -> Self {
        PmHomMetrics {
            visibility: m.visibility,
            depth: m.depth,
            plateau: m.plateau,
            overlap: m.overlap,
        }
    }
}

impl From<PmNoise> for NoiseSpec {
    fn from(n: PmNoise) -> Self {
        match n.kind {
            PmNoiseKind::None => NoiseSpec::None,
            PmNoiseKind::Gaussian => NoiseSpec::Gaussian { sigma: n.sigma },
            PmNoiseKind::Counts => NoiseSpec::Counts { events: n.events },
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

/// Failure inside a call: a status and its message.
struct Failure(PmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(PmStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PmStatus::NullPointer, format!("`{what}` is null"))
}

/// Run `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            PmStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            PmStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: caller guarantees `p` is null or a valid pointer.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: `out` is non-null and the caller guarantees it is writable.
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: caller guarantees `len` readable elements at `p`.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

unsafe fn copy_out(src: &[f64], out: *mut f64, capacity: usize, what: &str) -> Result<(), Failure> {
    if capacity < src.len() {
        return Err(Failure(
            PmStatus::BufferTooSmall,
            format!("`{what}` holds {capacity} values, {} needed", src.len()),
        ));
    }
    if src.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: `out` has room for `capacity >= src.len()` values.
    unsafe { ptr::copy_nonoverlapping(src.as_ptr(), out, src.len()) };
    Ok(())
}

unsafe fn free_box<T>(p: *mut T) {
    if !p.is_null() {
        // SAFETY: `p` came from `Box::into_raw` in this crate and is freed once.
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Message describing the last failure on this thread; empty after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---- modes ----

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn pm_mode_new(
    order_x: u32,
    order_y: u32,
    waist: f64,
    center_x: f64,
    center_y: f64,
    out: *mut *mut PmMode,
) -> PmStatus {
    guard(|| {
        let m = TransverseMode::new(order_x, order_y, waist, center_x, center_y)?;
        unsafe { write(out, Box::into_raw(Box::new(PmMode(m))), "out") }
    })
}

/// # Safety
/// `mode` must be null or a handle from [`pm_mode_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pm_mode_free(mode: *mut PmMode) {
    unsafe { free_box(mode) }
}

/// # Safety
/// `mode` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_mode_eval(mode: *const PmMode, x: f64, y: f64, out: *mut f64) -> PmStatus {
    guard(|| {
        let m = unsafe { deref(mode, "mode") }?;
        let v = photonmix::modes::eval_mode(&m.0, x, y)?;
        unsafe { write(out, v, "out") }
    })
}

/// Overlap integral of two modes over `window`, or the whole plane when
/// `window` is null.
///
/// # Safety
/// `a`, `b` must be live handles, `window` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_mode_overlap(
    a: *const PmMode,
    b: *const PmMode,
    window: *const PmWindow,
    out: *mut f64,
) -> PmStatus {
    guard(|| {
        let (a, b) = unsafe { (deref(a, "a")?, deref(b, "b")?) };
        let w: Option<Window> = unsafe { window.as_ref() }.map(|w| (*w).into());
        let v = photonmix::mode_overlap(&a.0, &b.0, w.as_ref())?;
        unsafe { write(out, v, "out") }
    })
}

// ---- LO states and beam splitters ----

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pm_lo_fock(n: u32, out: *mut *mut PmLoState) -> PmStatus {
    guard(|| unsafe { write(out, Box::into_raw(Box::new(PmLoState(LoState::Fock(n)))), "out") })
}

/// Coherent state with amplitude `alpha_re + i alpha_im`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pm_lo_coherent(alpha_re: f64, alpha_im: f64, out: *mut *mut PmLoState) -> PmStatus {
    guard(|| {
        let s = LoState::Coherent(Complex64::new(alpha_re, alpha_im));
        s.validate()?;
        unsafe { write(out, Box::into_raw(Box::new(PmLoState(s))), "out") }
    })
}

/// # Safety
/// `lo` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pm_lo_free(lo: *mut PmLoState) {
    unsafe { free_box(lo) }
}

/// `<n>` and `<n(n-1)>` of the state.
///
/// # Safety
/// `lo` must be a live handle; the outputs writable.
#[no_mangle]
pub unsafe extern "C" fn pm_lo_moments(lo: *const PmLoState, n_mean: *mut f64, n2fact: *mut f64) -> PmStatus {
    guard(|| {
        let (n, n2) = unsafe { deref(lo, "lo") }?.0.moments();
        unsafe {
            write(n_mean, n, "n_mean")?;
            write(n2fact, n2, "n2fact")
        }
    })
}

/// Beam splitter from `[re s11, im s11, re s12, im s12, re s21, im s21,
/// re s22, im s22]`. Fails unless the matrix is unitary.
///
/// # Safety
/// `s` must point to 8 readable doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_beam_splitter_new(s: *const f64, out: *mut *mut PmBeamSplitter) -> PmStatus {
    guard(|| {
        let v = unsafe { slice(s, 8, "s") }?;
        let c = |i: usize| Complex64::new(v[2 * i], v[2 * i + 1]);
        let bs = BeamSplitter::new(c(0), c(1), c(2), c(3))?;
        unsafe { write(out, Box::into_raw(Box::new(PmBeamSplitter(bs))), "out") }
    })
}

/// The symmetric splitter: `s11 = s22 = -1/sqrt(2)`, `s12 = s21 = i/sqrt(2)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pm_beam_splitter_symmetric(out: *mut *mut PmBeamSplitter) -> PmStatus {
    guard(|| unsafe { write(out, Box::into_raw(Box::new(PmBeamSplitter(BeamSplitter::symmetric()))), "out") })
}

/// # Safety
/// `bs` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pm_beam_splitter_free(bs: *mut PmBeamSplitter) {
    unsafe { free_box(bs) }
}

// ---- point correlations ----

/// # Safety
/// All handles must be live, `units` valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_w2_point_general(
    bs: *const PmBeamSplitter,
    lo: *const PmLoState,
    u_lo: *const PmMode,
    u_ph: *const PmMode,
    r1: PmPoint,
    r2: PmPoint,
    units: *const PmUnits,
    out: *mut PmCorrelation,
) -> PmStatus {
    guard(|| {
        let (bs, lo, l, p, u) =
            unsafe { (deref(bs, "bs")?, deref(lo, "lo")?, deref(u_lo, "u_lo")?, deref(u_ph, "u_ph")?, deref(units, "units")?) };
        let r = photonmix::w2_point_general(&bs.0, &lo.0, &l.0, &p.0, r1.into(), r2.into(), &(*u).into())?;
        unsafe { write(out, r.into(), "out") }
    })
}

/// # Safety
/// All handles must be live, `units` valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_w2_point_symmetric(
    lo: *const PmLoState,
    u_lo: *const PmMode,
    u_ph: *const PmMode,
    r1: PmPoint,
    r2: PmPoint,
    units: *const PmUnits,
    out: *mut PmCorrelation,
) -> PmStatus {
    guard(|| {
        let (lo, l, p, u) = unsafe { (deref(lo, "lo")?, deref(u_lo, "u_lo")?, deref(u_ph, "u_ph")?, deref(units, "units")?) };
        let r = photonmix::w2_point_symmetric(&lo.0, &l.0, &p.0, r1.into(), r2.into(), &(*u).into())?;
        unsafe { write(out, r.into(), "out") }
    })
}

/// Heterodyne term `|U_LO(r1) U_ph(r2) - U_LO(r2) U_ph(r1)|^2 <n>`.
///
/// # Safety
/// Handles must be live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_w2_heterodyne(
    u_lo: *const PmMode,
    u_ph: *const PmMode,
    r1: PmPoint,
    r2: PmPoint,
    n_mean: f64,
    out: *mut f64,
) -> PmStatus {
    guard(|| {
        let (l, p) = unsafe { (deref(u_lo, "u_lo")?, deref(u_ph, "u_ph")?) };
        if !(n_mean >= 0.0) || !n_mean.is_finite() {
            return Err(Failure(
                PmStatus::InvalidParameter,
                format!("invalid parameter `n_mean`: must be finite and non-negative, got {n_mean}"),
            ));
        }
        let v = photonmix::w2_heterodyne(&l.0, &p.0, r1.into(), r2.into(), n_mean);
        unsafe { write(out, v, "out") }
    })
}

// ---- finite apertures ----

/// Correlation integrated over two rectangular windows with efficiencies
/// `eta1`, `eta2`.
///
/// # Safety
/// Handles must be live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_w2_integrated(
    lo: *const PmLoState,
    u_lo: *const PmMode,
    u_ph: *const PmMode,
    window1: PmWindow,
    eta1: f64,
    window2: PmWindow,
    eta2: f64,
    eps: f64,
    out: *mut PmCorrelation,
) -> PmStatus {
    guard(|| {
        let (lo, l, p) = unsafe { (deref(lo, "lo")?, deref(u_lo, "u_lo")?, deref(u_ph, "u_ph")?) };
        let d1 = Detector::window(window1.into(), eta1)?;
        let d2 = Detector::window(window2.into(), eta2)?;
        let r = photonmix::w2_integrated(&lo.0, &l.0, &p.0, &d1, &d2, eps)?;
        unsafe { write(out, r.into(), "out") }
    })
}

/// Integrated correlation (reduced units) for each photon displacement in
/// `displacements`, written to `totals` (`len` values).
///
/// # Safety
/// Handles must be live; `displacements` and `totals` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn pm_misalignment_scan(
    lo: *const PmLoState,
    u_lo: *const PmMode,
    u_ph: *const PmMode,
    half_width: f64,
    displacements: *const f64,
    len: usize,
    totals: *mut f64,
) -> PmStatus {
    guard(|| {
        let (lo, l, p) = unsafe { (deref(lo, "lo")?, deref(u_lo, "u_lo")?, deref(u_ph, "u_ph")?) };
        let xs = unsafe { slice(displacements, len, "displacements") }?;
        let curve = photonmix::misalignment_scan(&lo.0, &l.0, &p.0, half_width, xs)?;
        let values: Vec<f64> = curve.totals().map(|(_, v)| v).collect();
        unsafe { copy_out(&values, totals, len, "totals") }
    })
}

/// HOM visibility and depth from a misalignment scan over `displacements`.
///
/// # Safety
/// Handles must be live; `displacements` must hold `len` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_hom_metrics(
    lo: *const PmLoState,
    u_lo: *const PmMode,
    u_ph: *const PmMode,
    half_width: f64,
    displacements: *const f64,
    len: usize,
    out: *mut PmHomMetrics,
) -> PmStatus {
    guard(|| {
        let (lo, l, p) = unsafe { (deref(lo, "lo")?, deref(u_lo, "u_lo")?, deref(u_ph, "u_ph")?) };
        let xs = unsafe { slice(displacements, len, "displacements") }?;
        let curve = photonmix::misalignment_scan(&lo.0, &l.0, &p.0, half_width, xs)?;
        let m = photonmix::hom_metrics(&curve)?;
        unsafe { write(out, m.into(), "out") }
    })
}

// ---- detector arrays ----

/// Synthesize array correlations for a known photon mode. With `pedestal`
/// nonzero the LO-only term is added and recorded.
///
/// # Safety
/// Handles must be live; `points` must hold `len` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_synthesize_array(
    lo: *const PmLoState,
    u_lo: *const PmMode,
    u_ph: *const PmMode,
    ref_point: PmPoint,
    points: *const PmPoint,
    len: usize,
    noise: PmNoise,
    seed: u64,
    pedestal: bool,
    out: *mut *mut PmMeasurement,
) -> PmStatus {
    guard(|| {
        let (lo, l, p) = unsafe { (deref(lo, "lo")?, deref(u_lo, "u_lo")?, deref(u_ph, "u_ph")?) };
        let pts: Vec<Point> = unsafe { slice(points, len, "points") }?.iter().map(|&q| q.into()).collect();
        let synth = if pedestal {
            synthesize_array_with_pedestal
        } else {
            photonmix::synthesize_array
        };
        let m = synth(&lo.0, &l.0, &p.0, ref_point.into(), &pts, noise.into(), seed)?;
        unsafe { write(out, Box::into_raw(Box::new(PmMeasurement(m))), "out") }
    })
}

/// Wrap externally measured heterodyne values (pedestal already removed).
///
/// # Safety
/// `points` and `values` must hold `len` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_measurement_new(
    ref_point: PmPoint,
    points: *const PmPoint,
    values: *const f64,
    len: usize,
    n_mean: f64,
    out: *mut *mut PmMeasurement,
) -> PmStatus {
    guard(|| {
        let pts = unsafe { slice(points, len, "points") }?;
        let vals = unsafe { slice(values, len, "values") }?;
        let m = ArrayMeasurement {
            ref_point: ref_point.into(),
            points: pts.iter().map(|&q| q.into()).collect(),
            values: vals.to_vec(),
            n_mean,
            noise: NoiseSpec::None,
            pedestals: None,
        };
        m.validate()?;
        unsafe { write(out, Box::into_raw(Box::new(PmMeasurement(m))), "out") }
    })
}

/// Number of array elements, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pm_measurement_len(m: *const PmMeasurement) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.0.values.len())
}

/// Copy the measured values into `out` (room for `capacity` values).
///
/// # Safety
/// `m` must be a live handle and `out` hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn pm_measurement_values(m: *const PmMeasurement, out: *mut f64, capacity: usize) -> PmStatus {
    guard(|| {
        let m = unsafe { deref(m, "measurement") }?;
        unsafe { copy_out(&m.0.values, out, capacity, "out") }
    })
}

/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pm_measurement_free(m: *mut PmMeasurement) {
    unsafe { free_box(m) }
}

/// Reconstruct the photon profile. `anchor` is the photon amplitude at the
/// reference point, or null for an unanchored reconstruction.
///
/// # Safety
/// Handles must be live, `anchor` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_reconstruct(
    m: *const PmMeasurement,
    u_lo: *const PmMode,
    anchor: *const f64,
    out: *mut *mut PmProfile,
) -> PmStatus {
    guard(|| {
        let (m, l) = unsafe { (deref(m, "measurement")?, deref(u_lo, "u_lo")?) };
        let anchor = unsafe { anchor.as_ref() }.copied();
        let prof = photonmix::reconstruct(&m.0, &l.0, anchor)?;
        unsafe { write(out, Box::into_raw(Box::new(PmProfile(prof))), "out") }
    })
}

/// Number of reconstructed amplitudes, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pm_profile_len(p: *const PmProfile) -> usize {
    unsafe { p.as_ref() }.map_or(0, |p| p.0.amplitudes.len())
}

/// # Safety
/// `p` must be a live handle and `out` hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn pm_profile_amplitudes(p: *const PmProfile, out: *mut f64, capacity: usize) -> PmStatus {
    guard(|| {
        let p = unsafe { deref(p, "profile") }?;
        unsafe { copy_out(&p.0.amplitudes, out, capacity, "out") }
    })
}

/// RMS misfit and the photon amplitude at the reference point.
///
/// # Safety
/// `p` must be a live handle; the outputs writable.
#[no_mangle]
pub unsafe extern "C" fn pm_profile_summary(p: *const PmProfile, residual: *mut f64, anchor_value: *mut f64) -> PmStatus {
    guard(|| {
        let p = unsafe { deref(p, "profile") }?;
        unsafe {
            write(residual, p.0.residual, "residual")?;
            write(anchor_value, p.0.anchor_value, "anchor_value")
        }
    })
}

/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pm_profile_free(p: *mut PmProfile) {
    unsafe { free_box(p) }
}
