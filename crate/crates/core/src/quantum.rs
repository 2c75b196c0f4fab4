//! LO state moments, the beam-splitter S-matrix and the point-detector
//! correlation kernels.
//!
//! With the photon port fixed at `|1>` and the LO in `|psi_LO>`, the
//! coincidence rate of two point apertures behind a beam splitter is
//!
//! ```text
//! w2 = eta^2 dS^2 eps^4 { |s11 s21 U_LO(r1) U_LO(r2)|^2 <n(n-1)>
//!                       + |s11 s22 U_LO(r1) U_ph(r2) + s12 s21 U_LO(r2) U_ph(r1)|^2 <n> }
//! ```
//!
//! The first bracket term is the LO-only contribution, the second the
//! heterodyne contribution.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modes::TransverseMode;

/// Unitarity tolerance for beam-splitter matrices.
pub const UNITARITY_TOL: f64 = 1e-12;

/// `|s11 s21|^2 = |s11 s22|^2 = |s12 s21|^2` for the symmetric 50:50 preset.
pub const SYMMETRIC_BS_FACTOR: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Quantum state of the local-oscillator port, reduced to what the
/// correlation needs: `<n>` and `<n(n-1)>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoState {
    Fock(u32),
    Coherent(Complex64),
}

impl LoState {
    /// Coherent state with real amplitude `sqrt(intensity)`.
    pub fn coherent_with_intensity(intensity: f64) -> Result<Self> {
        if !(intensity >= 0.0) || !intensity.is_finite() {
            return Err(Error::invalid("alpha_sq", format!("must be finite and >= 0, got {intensity}")));
        }
        Ok(LoState::Coherent(Complex64::new(intensity.sqrt(), 0.0)))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LoState::Fock(_) => Ok(()),
            LoState::Coherent(a) if a.re.is_finite() && a.im.is_finite() => Ok(()),
            LoState::Coherent(_) => Err(Error::invalid("alpha", "must be finite")),
        }
    }

    /// `(<n>, <n(n-1)>)`.
    pub fn moments(&self) -> (f64, f64) {
        match *self {
            LoState::Fock(n) => {
                let n = f64::from(n);
                (n, n * (n - 1.0))
            }
            LoState::Coherent(alpha) => {
                let n = alpha.norm_sqr();
                (n, n * n)
            }
        }
    }

    pub fn mean_photons(&self) -> f64 {
        self.moments().0
    }
}

/// `(<n>, <n(n-1)>)` of an LO state.
pub fn lo_moments(state: &LoState) -> (f64, f64) {
    state.moments()
}

/// Unitary 2x2 beam-splitter S-matrix mapping `(E_LO, E_ph)` onto the two
/// output ports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    s: [[Complex64; 2]; 2],
}

impl BeamSplitter {
    pub fn new(s11: Complex64, s12: Complex64, s21: Complex64, s22: Complex64) -> Result<Self> {
        let bs = Self {
            s: [[s11, s12], [s21, s22]],
        };
        bs.check_unitary()?;
        Ok(bs)
    }

    /// `s11 = s22 = -1/sqrt2`, `s12 = s21 = i/sqrt2`.
    pub fn symmetric() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            s: [
                [Complex64::new(-r, 0.0), Complex64::new(0.0, r)],
                [Complex64::new(0.0, r), Complex64::new(-r, 0.0)],
            ],
        }
    }

    pub fn s11(&self) -> Complex64 {
        self.s[0][0]
    }
    pub fn s12(&self) -> Complex64 {
        self.s[0][1]
    }
    pub fn s21(&self) -> Complex64 {
        self.s[1][0]
    }
    pub fn s22(&self) -> Complex64 {
        self.s[1][1]
    }

    /// Largest deviation of `S S^dagger` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let [r0, r1] = self.s;
        let n0 = r0[0].norm_sqr() + r0[1].norm_sqr();
        let n1 = r1[0].norm_sqr() + r1[1].norm_sqr();
        let cross = r0[0] * r1[0].conj() + r0[1] * r1[1].conj();
        (n0 - 1.0).abs().max((n1 - 1.0).abs()).max(cross.norm())
    }

    pub fn check_unitary(&self) -> Result<()> {
        let defect = self.unitarity_defect();
        if !(defect <= UNITARITY_TOL) {
            return Err(Error::invalid(
                "beam_splitter",
                format!("unitarity violated: |S S^dagger - I| = {defect:e} exceeds {UNITARITY_TOL:e}"),
            ));
        }
        Ok(())
    }
}

/// Efficiency, aperture area and single-photon field unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    pub eta: f64,
    pub d_s: f64,
    pub eps: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            eta: 1.0,
            d_s: 1.0,
            eps: 1.0,
        }
    }
}

impl Units {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::invalid("eta", format!("must lie in (0, 1], got {}", self.eta)));
        }
        if !(self.d_s > 0.0) || !self.d_s.is_finite() {
            return Err(Error::invalid("dS", format!("must be positive, got {}", self.d_s)));
        }
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::invalid("eps", format!("must be positive, got {}", self.eps)));
        }
        Ok(())
    }

    /// `eta^2 dS^2 eps^4`.
    pub fn point_prefactor(&self) -> f64 {
        let e2 = self.eps * self.eps;
        self.eta * self.eta * self.d_s * self.d_s * e2 * e2
    }
}

/// A correlation value split into its LO-only and heterodyne parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    pub lo_term: f64,
    pub het_term: f64,
    /// `lo_term + het_term`.
    pub total_reduced: f64,
    /// `prefactor * total_reduced`.
    pub total_physical: f64,
    pub prefactor: f64,
}

impl CorrelationResult {
    pub fn new(lo_term: f64, het_term: f64, prefactor: f64) -> Self {
        let total_reduced = lo_term + het_term;
        Self {
            lo_term,
            het_term,
            total_reduced,
            total_physical: prefactor * total_reduced,
            prefactor,
        }
    }

    pub fn lo_physical(&self) -> f64 {
        self.prefactor * self.lo_term
    }

    pub fn het_physical(&self) -> f64 {
        self.prefactor * self.het_term
    }
}

fn validate_inputs(lo: &LoState, u_lo: &TransverseMode, u_ph: &TransverseMode, units: &Units) -> Result<()> {
    lo.validate()?;
    u_lo.validate()?;
    u_ph.validate()?;
    units.validate()
}

/// Point-aperture correlation for an arbitrary unitary beam splitter.
///
/// Reduced units strip `eta^2 dS^2 eps^4` only; the S-matrix products stay
/// inside `lo_term` and `het_term`.
#[allow(clippy::too_many_arguments)]
pub fn w2_point_general(
    bs: &BeamSplitter,
    lo: &LoState,
    u_lo: &TransverseMode,
    u_ph: &TransverseMode,
    r1: Point,
    r2: Point,
    units: &Units,
) -> Result<CorrelationResult> {
    bs.check_unitary()?;
    validate_inputs(lo, u_lo, u_ph, units)?;
    let (n_mean, n2fact) = lo.moments();
    let l1 = u_lo.eval(r1.x, r1.y);
    let l2 = u_lo.eval(r2.x, r2.y);
    let p1 = u_ph.eval(r1.x, r1.y);
    let p2 = u_ph.eval(r2.x, r2.y);

    let lo_amp = bs.s11() * bs.s21() * (l1 * l2);
    let het_amp = bs.s11() * bs.s22() * (l1 * p2) + bs.s12() * bs.s21() * (l2 * p1);
    let res = CorrelationResult::new(
        lo_amp.norm_sqr() * n2fact,
        het_amp.norm_sqr() * n_mean,
        units.point_prefactor(),
    );
    ensure_finite(res)
}

/// Point-aperture correlation for the symmetric beam splitter.
///
/// Reduced units additionally strip the splitter factor
/// [`SYMMETRIC_BS_FACTOR`], which is carried in `prefactor`.
pub fn w2_point_symmetric(
    lo: &LoState,
    u_lo: &TransverseMode,
    u_ph: &TransverseMode,
    r1: Point,
    r2: Point,
    units: &Units,
) -> Result<CorrelationResult> {
    validate_inputs(lo, u_lo, u_ph, units)?;
    let (n_mean, n2fact) = lo.moments();
    let l1 = u_lo.eval(r1.x, r1.y);
    let l2 = u_lo.eval(r2.x, r2.y);
    let lo_amp = l1 * l2;
    let res = CorrelationResult::new(
        lo_amp * lo_amp * n2fact,
        w2_heterodyne(u_lo, u_ph, r1, r2, n_mean),
        SYMMETRIC_BS_FACTOR * units.point_prefactor(),
    );
    ensure_finite(res)
}

/// Heterodyne term in reduced units:
/// `|U_LO(r1) U_ph(r2) - U_LO(r2) U_ph(r1)|^2 <n>`.
pub fn w2_heterodyne(u_lo: &TransverseMode, u_ph: &TransverseMode, r1: Point, r2: Point, n_mean: f64) -> f64 {
    let det = u_lo.eval(r1.x, r1.y) * u_ph.eval(r2.x, r2.y) - u_lo.eval(r2.x, r2.y) * u_ph.eval(r1.x, r1.y);
    det * det * n_mean
}

fn ensure_finite(res: CorrelationResult) -> Result<CorrelationResult> {
    if res.total_physical.is_finite() && res.total_reduced.is_finite() {
        Ok(res)
    } else {
        Err(Error::NumericalDomain("correlation value is not finite".into()))
    }
}
