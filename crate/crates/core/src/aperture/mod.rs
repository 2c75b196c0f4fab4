//! Finite detector windows: integrated correlations, misalignment scans and
//! HOM dip visibility/depth.
//!
//! For two windows the four-dimensional integral of the symmetric-splitter
//! correlation factorizes into 2-D window overlaps `I_XY(k) = ∬_k U_X U_Y`:
//!
//! ```text
//! lo_term  = <n(n-1)> I_LL(1) I_LL(2)
//! het_term = <n> [I_LL(1) I_PP(2) + I_LL(2) I_PP(1) - 2 I_LP(1) I_LP(2)]
//! ```

mod quadrature;

use rayon::prelude::*;

pub use quadrature::{quad2d, GaussLegendre, Integrator, QuadEstimate, Window, DEFAULT_ORDER, ORDER_ENV};

use crate::error::{Error, Result};
use crate::modes::{TransverseMode, SUPPORT_WAISTS};
use crate::quantum::{CorrelationResult, LoState, Point, SYMMETRIC_BS_FACTOR};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetectorShape {
    /// Point-like aperture of area `area` at `(x, y)`.
    Point { x: f64, y: f64, area: f64 },
    Window(Window),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detector {
    pub shape: DetectorShape,
    pub eta: f64,
}

impl Detector {
    pub fn point(x: f64, y: f64, area: f64, eta: f64) -> Result<Self> {
        let d = Self {
            shape: DetectorShape::Point { x, y, area },
            eta,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn window(window: Window, eta: f64) -> Result<Self> {
        let d = Self {
            shape: DetectorShape::Window(window),
            eta,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::invalid("eta", format!("must lie in (0, 1], got {}", self.eta)));
        }
        match self.shape {
            DetectorShape::Point { x, y, area } => {
                if !x.is_finite() || !y.is_finite() {
                    return Err(Error::invalid("detector position", "must be finite"));
                }
                if !(area > 0.0) || !area.is_finite() {
                    return Err(Error::invalid("dS", format!("must be positive, got {area}")));
                }
                Ok(())
            }
            DetectorShape::Window(w) => w.validate(),
        }
    }

    pub fn as_window(&self) -> Option<&Window> {
        match &self.shape {
            DetectorShape::Window(w) => Some(w),
            DetectorShape::Point { .. } => None,
        }
    }

    pub fn position(&self) -> Point {
        match self.shape {
            DetectorShape::Point { x, y, .. } => Point::new(x, y),
            DetectorShape::Window(w) => Point::new(w.center_x, w.center_y),
        }
    }
}

/// The three window overlaps entering the factorized integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowOverlaps {
    pub lo_lo: f64,
    pub ph_ph: f64,
    pub lo_ph: f64,
}

impl Integrator {
    pub fn window_overlaps(&self, u_lo: &TransverseMode, u_ph: &TransverseMode, window: &Window) -> Result<WindowOverlaps> {
        Ok(WindowOverlaps {
            lo_lo: self.overlap(u_lo, u_lo, Some(window))?,
            ph_ph: self.overlap(u_ph, u_ph, Some(window))?,
            lo_ph: self.overlap(u_lo, u_ph, Some(window))?,
        })
    }

    /// Window-integrated correlation behind the symmetric beam splitter.
    ///
    /// `prefactor` is `eta1 eta2 eps^4 / 4`; aperture areas are absorbed by
    /// the integrals.
    pub fn w2_integrated(
        &self,
        lo: &LoState,
        u_lo: &TransverseMode,
        u_ph: &TransverseMode,
        det1: &Detector,
        det2: &Detector,
        eps: f64,
    ) -> Result<CorrelationResult> {
        lo.validate()?;
        det1.validate()?;
        det2.validate()?;
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::invalid("eps", format!("must be positive, got {eps}")));
        }
        let (Some(w1), Some(w2)) = (det1.as_window(), det2.as_window()) else {
            return Err(Error::invalid("detector", "integrated correlation needs window detectors"));
        };
        let i1 = self.window_overlaps(u_lo, u_ph, w1)?;
        let i2 = self.window_overlaps(u_lo, u_ph, w2)?;
        let (n_mean, n2fact) = lo.moments();

        let lo_term = n2fact * i1.lo_lo * i2.lo_lo;
        let direct = i1.lo_lo * i2.ph_ph + i2.lo_lo * i1.ph_ph;
        let mut het = direct - 2.0 * i1.lo_ph * i2.lo_ph;
        // Cauchy-Schwarz keeps the bracket non-negative; only round-off can push it below.
        if het < 0.0 {
            if het < -1e-12 * direct.max(1.0) {
                return Err(Error::NumericalDomain(format!("negative heterodyne integral {het:e}")));
            }
            het = 0.0;
        }
        let e2 = eps * eps;
        let prefactor = SYMMETRIC_BS_FACTOR * det1.eta * det2.eta * e2 * e2;
        let res = CorrelationResult::new(lo_term, n_mean * het, prefactor);
        if !res.total_physical.is_finite() {
            return Err(Error::NumericalDomain("integrated correlation is not finite".into()));
        }
        Ok(res)
    }

    /// Integrated correlation as the photon mode is displaced along x while
    /// the LO stays fixed. Both detectors are the same window of
    /// half-width `half_width` centered on the LO axis; the window is
    /// effectively unbounded in y.
    pub fn misalignment_scan(
        &self,
        lo: &LoState,
        u_lo: &TransverseMode,
        u_ph: &TransverseMode,
        half_width: f64,
        displacements: &[f64],
    ) -> Result<ScanCurve> {
        if displacements.is_empty() {
            return Err(Error::InvalidInput("displacement list is empty".into()));
        }
        u_lo.validate()?;
        u_ph.validate()?;
        let half_y = SUPPORT_WAISTS * u_lo.waist.max(u_ph.waist) + (u_ph.center_y - u_lo.center_y).abs();
        let window = Window::new(u_lo.center_x, u_lo.center_y, half_width, half_y)?;
        let det = Detector::window(window, 1.0)?;

        let values = displacements
            .par_iter()
            .map(|&x_d| {
                let mut ph = *u_ph;
                ph.center_x = x_d;
                self.w2_integrated(lo, u_lo, &ph, &det, &det, 1.0)
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(ScanCurve {
            parameter: "x_d".into(),
            parameter_values: displacements.to_vec(),
            values,
            description: format!(
                "misalignment scan: LO {:?}, photon TEM{}{} w0={}, window half-width {}",
                lo, u_ph.order_x, u_ph.order_y, u_ph.waist, half_width
            ),
            geometry: Some(ScanGeometry {
                window_center_x: u_lo.center_x,
                half_width,
                lo_center_x: u_lo.center_x,
                lo_waist: u_lo.waist,
                photon_waist: u_ph.waist,
            }),
        })
    }
}

/// Window-integrated correlation at the default quadrature order.
pub fn w2_integrated(
    lo: &LoState,
    u_lo: &TransverseMode,
    u_ph: &TransverseMode,
    det1: &Detector,
    det2: &Detector,
    eps: f64,
) -> Result<CorrelationResult> {
    Integrator::default().w2_integrated(lo, u_lo, u_ph, det1, det2, eps)
}

/// Misalignment scan at the default quadrature order.
pub fn misalignment_scan(
    lo: &LoState,
    u_lo: &TransverseMode,
    u_ph: &TransverseMode,
    half_width: f64,
    displacements: &[f64],
) -> Result<ScanCurve> {
    Integrator::default().misalignment_scan(lo, u_lo, u_ph, half_width, displacements)
}

/// Geometry of a misalignment scan, needed to locate the plateau and the
/// full-overlap point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGeometry {
    pub window_center_x: f64,
    pub half_width: f64,
    pub lo_center_x: f64,
    pub lo_waist: f64,
    pub photon_waist: f64,
}

/// Correlation values along a scanned coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanCurve {
    pub parameter: String,
    pub parameter_values: Vec<f64>,
    pub values: Vec<CorrelationResult>,
    pub description: String,
    pub geometry: Option<ScanGeometry>,
}

impl ScanCurve {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn totals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.parameter_values
            .iter()
            .zip(&self.values)
            .map(|(&p, v)| (p, v.total_reduced))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomMetrics {
    /// `(plateau - overlap) / plateau`.
    pub visibility: f64,
    /// `plateau - overlap`, reduced units.
    pub depth: f64,
    pub plateau: f64,
    pub overlap: f64,
}

/// Visibility and depth of the HOM dip in a misalignment curve.
///
/// The overlap value is read at the displacement equal to the LO center.
/// The plateau is the curve maximum over displacements farther than
/// `4 w0` from the LO axis whose photon support (`±6 w0`) lies entirely
/// inside the window.
pub fn hom_metrics(curve: &ScanCurve) -> Result<HomMetrics> {
    if curve.parameter_values.len() != curve.values.len() {
        return Err(Error::InvalidInput("scan parameter and value lengths differ".into()));
    }
    let geom = curve
        .geometry
        .ok_or_else(|| Error::InvalidInput("scan curve carries no misalignment geometry".into()))?;
    let waist = geom.lo_waist.max(geom.photon_waist);

    let (overlap_idx, overlap_dist) = curve
        .parameter_values
        .iter()
        .map(|x| (x - geom.lo_center_x).abs())
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::InvalidInput("scan curve is empty".into()))?;
    if overlap_dist > 1e-9 * waist {
        return Err(Error::InvalidInput(format!(
            "scan has no full-overlap point (closest displacement is {overlap_dist} from the LO axis)"
        )));
    }
    let overlap = curve.values[overlap_idx].total_reduced;

    let plateau = curve
        .totals()
        .filter(|&(x, _)| {
            (x - geom.lo_center_x).abs() > 4.0 * waist
                && (x - geom.window_center_x).abs() + SUPPORT_WAISTS * geom.photon_waist <= geom.half_width
        })
        .map(|(_, v)| v)
        .max_by(f64::total_cmp)
        .ok_or_else(|| {
            Error::InvalidInput(
                "no plateau region: no displacement keeps the photon mode disjoint from the LO and inside the window"
                    .into(),
            )
        })?;

    if plateau == 0.0 {
        return Err(Error::UndefinedVisibility);
    }
    let depth = plateau - overlap;
    Ok(HomMetrics {
        visibility: depth / plateau,
        depth,
        plateau,
        overlap,
    })
}
