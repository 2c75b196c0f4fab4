//! Tensor-product Gauss-Legendre quadrature over rectangular windows.

use crate::error::{Error, Result};
use crate::modes::TransverseMode;

/// Default Gauss-Legendre order per axis.
pub const DEFAULT_ORDER: usize = 64;

/// Environment variable that overrides the quadrature order in the CLI.
pub const ORDER_ENV: &str = "PHOTONMIX_QUAD_ORDER";

/// Axis-aligned rectangle described by its center and half-widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub center_x: f64,
    pub center_y: f64,
    pub half_width_x: f64,
    pub half_width_y: f64,
}

impl Window {
    pub fn new(center_x: f64, center_y: f64, half_width_x: f64, half_width_y: f64) -> Result<Self> {
        let w = Self {
            center_x,
            center_y,
            half_width_x,
            half_width_y,
        };
        w.validate()?;
        Ok(w)
    }

    /// Window spanning `[x0, x1] x [y0, y1]`.
    pub fn from_bounds(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Self::new(0.5 * (x0 + x1), 0.5 * (y0 + y1), 0.5 * (x1 - x0), 0.5 * (y1 - y0))
    }

    pub fn validate(&self) -> Result<()> {
        if !self.center_x.is_finite() || !self.center_y.is_finite() {
            return Err(Error::invalid("window center", "must be finite"));
        }
        if !(self.half_width_x > 0.0) || !(self.half_width_y > 0.0) {
            return Err(Error::invalid(
                "window half-width",
                format!(
                    "must be positive, got ({}, {})",
                    self.half_width_x, self.half_width_y
                ),
            ));
        }
        Ok(())
    }

    pub(crate) fn bounds(&self) -> Rect {
        Rect {
            x0: self.center_x - self.half_width_x,
            x1: self.center_x + self.half_width_x,
            y0: self.center_y - self.half_width_y,
            y1: self.center_y + self.half_width_y,
        }
    }
}

/// Closed rectangle by its corner coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    /// Intersection, or `None` when it has no interior.
    pub fn intersect(&self, other: &Rect) -> Option<Rect> {
        let r = Rect {
            x0: self.x0.max(other.x0),
            x1: self.x1.min(other.x1),
            y0: self.y0.max(other.y0),
            y1: self.y1.min(other.y1),
        };
        (r.x1 > r.x0 && r.y1 > r.y0).then_some(r)
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `order` nodes; roots of P_n located by Newton iteration.
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::invalid("order", format!("must be at least 2, got {order}")));
        }
        let n = order;
        let nf = n as f64;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }

    pub fn integrate_1d(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    fn integrate_rect(&self, rect: &Rect, f: &mut impl FnMut(f64, f64) -> f64) -> Result<f64> {
        let ys: Vec<(f64, f64)> = self.mapped(rect.y0, rect.y1).collect();
        let mut total = 0.0;
        for (x, wx) in self.mapped(rect.x0, rect.x1) {
            let mut row = 0.0;
            for &(y, wy) in &ys {
                let v = f(x, y);
                if !v.is_finite() {
                    return Err(Error::NumericalDomain(format!(
                        "integrand is {v} at ({x}, {y})"
                    )));
                }
                row += wy * v;
            }
            total += wx * row;
        }
        Ok(total)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A quadrature estimate at `order` together with the estimate at `2 * order`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub refined: f64,
    /// `|refined - value|`.
    pub error: f64,
}

impl QuadEstimate {
    fn new(value: f64, refined: f64) -> Self {
        Self {
            value,
            refined,
            error: (refined - value).abs(),
        }
    }
}

/// Holds the Gauss-Legendre rules at a base order and at twice that order.
#[derive(Debug, Clone)]
pub struct Integrator {
    rule: GaussLegendre,
    refined: GaussLegendre,
}

impl Default for Integrator {
    fn default() -> Self {
        Self::new(DEFAULT_ORDER).expect("default order is valid")
    }
}

impl Integrator {
    pub fn new(order: usize) -> Result<Self> {
        Ok(Self {
            rule: GaussLegendre::new(order)?,
            refined: GaussLegendre::new(2 * order)?,
        })
    }

    /// Order from `PHOTONMIX_QUAD_ORDER`, falling back to the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var(ORDER_ENV) {
            Ok(raw) => {
                let order: usize = raw.trim().parse().map_err(|_| {
                    Error::config(None, format!("{ORDER_ENV}: `{raw}` is not a positive integer"))
                })?;
                Self::new(order).map_err(|e| Error::config(None, format!("{ORDER_ENV}: {e}")))
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn order(&self) -> usize {
        self.rule.order()
    }

    /// Tensor-product estimate of `∬ f` over `window`.
    pub fn quad2d(&self, mut f: impl FnMut(f64, f64) -> f64, window: &Window) -> Result<QuadEstimate> {
        window.validate()?;
        let rect = window.bounds();
        let value = self.rule.integrate_rect(&rect, &mut f)?;
        let refined = self.refined.integrate_rect(&rect, &mut f)?;
        Ok(QuadEstimate::new(value, refined))
    }

    /// `∬ U_a U_b` over `window` (whole plane when `None`).
    ///
    /// The domain is clipped to the `±6 w0` supports of both modes, outside
    /// of which the integrand is negligible. The tensor rule is evaluated
    /// in its separable form, as a product of two 1-D sums.
    pub fn overlap(&self, a: &TransverseMode, b: &TransverseMode, window: Option<&Window>) -> Result<f64> {
        self.overlap_with(&self.rule, a, b, window)
    }

    /// Overlap at the base order and at the refined order.
    pub fn overlap_estimate(
        &self,
        a: &TransverseMode,
        b: &TransverseMode,
        window: Option<&Window>,
    ) -> Result<QuadEstimate> {
        let value = self.overlap_with(&self.rule, a, b, window)?;
        let refined = self.overlap_with(&self.refined, a, b, window)?;
        Ok(QuadEstimate::new(value, refined))
    }

    fn overlap_with(
        &self,
        rule: &GaussLegendre,
        a: &TransverseMode,
        b: &TransverseMode,
        window: Option<&Window>,
    ) -> Result<f64> {
        a.validate()?;
        b.validate()?;
        let mut domain = a.support().bounds().intersect(&b.support().bounds());
        if let Some(w) = window {
            w.validate()?;
            domain = domain.and_then(|d| d.intersect(&w.bounds()));
        }
        let Some(rect) = domain else {
            return Ok(0.0);
        };
        let ix = rule.integrate_1d(rect.x0, rect.x1, |x| a.eval_x(x) * b.eval_x(x));
        let iy = rule.integrate_1d(rect.y0, rect.y1, |y| a.eval_y(y) * b.eval_y(y));
        let v = ix * iy;
        if !v.is_finite() {
            return Err(Error::NumericalDomain("mode overlap is not finite".into()));
        }
        Ok(v)
    }
}

/// Tensor-product Gauss-Legendre estimate of `∬ f` over `window` with
/// `order` nodes per axis; `refined` uses `2 * order` nodes.
pub fn quad2d(f: impl FnMut(f64, f64) -> f64, window: &Window, order: usize) -> Result<QuadEstimate> {
    Integrator::new(order)?.quad2d(f, window)
}
