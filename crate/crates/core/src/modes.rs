//! Hermite-Gaussian transverse modes.
//!
//! Modes are real, unit-L2-normalized and evaluated at the waist plane (no
//! Gouy or curvature phase):
//!
//! ```text
//! U(x, y) = N_n N_m H_n(sqrt2 (x - cx) / w0) H_m(sqrt2 (y - cy) / w0)
//!           * exp(-((x - cx)^2 + (y - cy)^2) / w0^2)
//! N_k     = (2 / pi)^(1/4) / sqrt(w0 2^k k!)
//! ```

use std::f64::consts::{FRAC_2_PI, SQRT_2};

use crate::aperture::{Integrator, Window};
use crate::error::{Error, Result};

/// Half-width, in waists, beyond which a mode is treated as zero.
pub const SUPPORT_WAISTS: f64 = 6.0;

/// A unit-normalized Hermite-Gaussian TEM_{nm} amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseMode {
    pub order_x: u32,
    pub order_y: u32,
    pub waist: f64,
    pub center_x: f64,
    pub center_y: f64,
}

impl TransverseMode {
    pub fn new(order_x: u32, order_y: u32, waist: f64, center_x: f64, center_y: f64) -> Result<Self> {
        let mode = Self {
            order_x,
            order_y,
            waist,
            center_x,
            center_y,
        };
        mode.validate()?;
        Ok(mode)
    }

    /// Centered TEM_{nm} with the given waist.
    pub fn centered(order_x: u32, order_y: u32, waist: f64) -> Result<Self> {
        Self::new(order_x, order_y, waist, 0.0, 0.0)
    }

    /// Fundamental Gaussian (TEM00).
    pub fn gaussian(waist: f64) -> Result<Self> {
        Self::centered(0, 0, waist)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.waist > 0.0) || !self.waist.is_finite() {
            return Err(Error::invalid("waist", format!("must be positive and finite, got {}", self.waist)));
        }
        if !self.center_x.is_finite() || !self.center_y.is_finite() {
            return Err(Error::invalid("center", "must be finite"));
        }
        Ok(())
    }

    pub fn with_center(mut self, center_x: f64, center_y: f64) -> Self {
        self.center_x = center_x;
        self.center_y = center_y;
        self
    }

    /// Mode amplitude at `(x, y)`, in inverse length units.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_x(x) * self.eval_y(y)
    }

    /// The x factor of the separable amplitude.
    pub fn eval_x(&self, x: f64) -> f64 {
        hermite_gauss_1d(self.order_x, self.waist, x - self.center_x)
    }

    /// The y factor of the separable amplitude.
    pub fn eval_y(&self, y: f64) -> f64 {
        hermite_gauss_1d(self.order_y, self.waist, y - self.center_y)
    }

    /// Rectangle of half-width `SUPPORT_WAISTS * waist` around the mode center.
    pub fn support(&self) -> Window {
        let half = SUPPORT_WAISTS * self.waist;
        Window {
            center_x: self.center_x,
            center_y: self.center_y,
            half_width_x: half,
            half_width_y: half,
        }
    }
}

/// Checked evaluation of a mode amplitude.
pub fn eval_mode(mode: &TransverseMode, x: f64, y: f64) -> Result<f64> {
    mode.validate()?;
    Ok(mode.eval(x, y))
}

/// Physicists' Hermite polynomial H_n(t) by the three-term recurrence.
pub fn hermite(n: u32, t: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * t;
    for k in 1..n {
        let next = 2.0 * t * cur - 2.0 * f64::from(k) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// 1-D normalized Hermite-Gaussian factor at offset `dx` from the axis.
fn hermite_gauss_1d(n: u32, waist: f64, dx: f64) -> f64 {
    let s = dx / waist;
    norm_1d(n, waist) * hermite(n, SQRT_2 * s) * (-s * s).exp()
}

fn norm_1d(n: u32, waist: f64) -> f64 {
    // 2^n n! accumulated as a float; exact for the orders used here.
    let scale: f64 = (1..=n).map(|k| 2.0 * f64::from(k)).product();
    FRAC_2_PI.sqrt().sqrt() / (waist * scale).sqrt()
}

/// `∬ U_a U_b dx dy` over `window`, or over the whole plane when `None`,
/// using the default quadrature order.
pub fn mode_overlap(a: &TransverseMode, b: &TransverseMode, window: Option<&Window>) -> Result<f64> {
    Integrator::default().overlap(a, b, window)
}
