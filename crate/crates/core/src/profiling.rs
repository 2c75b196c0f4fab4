//! Detector-array synthesis and photon mode-profile reconstruction.
//!
//! One aperture sits at a fixed reference point `r0` in front of D1; an
//! array of apertures `r_m` replaces D2. Each array element correlates with
//! D1 and yields the heterodyne value
//!
//! ```text
//! w_m = <n> |U_LO(r0) U_ph(r_m) - U_LO(r_m) U_ph(r0)|^2
//! ```
//!
//! Writing `b = U_LO(r0)`, `a_m = U_LO(r_m)`, `p = U_ph(r0)` and
//! `rho_m = sqrt(w_m / <n>)`, each element gives `|b U_m - a_m p| = rho_m`,
//! so `U_m = (a_m p + s_m rho_m) / b` with an unknown sign `s_m`.
//!
//! The data are unchanged under `U_ph -> ±(U_ph + lambda U_LO)`. The sign
//! pattern is fixed by continuity of `b U_m - a_m p` across the array; the
//! remaining freedom is fixed by the anchor `p` when given and otherwise by
//! taking the profile with the least LO content over the sampled points.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::modes::TransverseMode;
use crate::quantum::{w2_heterodyne, LoState, Point};

/// Below this `|U_LO(r0)|` the reference aperture cannot anchor the inversion.
pub const MIN_ANCHOR_AMPLITUDE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum NoiseSpec {
    #[default]
    None,
    /// `w -> max(0, w (1 + sigma g))`, `g` standard normal.
    Gaussian { sigma: f64 },
    /// Poisson counts with the curve maximum mapped to `events` counts.
    Counts { events: u64 },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::None => Ok(()),
            NoiseSpec::Gaussian { sigma } if sigma >= 0.0 && sigma.is_finite() => Ok(()),
            NoiseSpec::Gaussian { sigma } => {
                Err(Error::invalid("noise.sigma", format!("must be finite and >= 0, got {sigma}")))
            }
            NoiseSpec::Counts { events } if events > 0 => Ok(()),
            NoiseSpec::Counts { .. } => Err(Error::invalid("noise.events", "must be positive")),
        }
    }
}

impl std::fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NoiseSpec::None => write!(f, "none"),
            NoiseSpec::Gaussian { sigma } => write!(f, "gaussian sigma={sigma}"),
            NoiseSpec::Counts { events } => write!(f, "counts events={events}"),
        }
    }
}

/// Correlations recorded by a detector array against a fixed aperture.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayMeasurement {
    pub ref_point: Point,
    pub points: Vec<Point>,
    /// Measured values, reduced units. Contains the LO pedestal when
    /// `pedestals` is present.
    pub values: Vec<f64>,
    pub n_mean: f64,
    pub noise: NoiseSpec,
    /// Known LO-only term per element, subtracted before inversion.
    pub pedestals: Option<Vec<f64>>,
}

impl ArrayMeasurement {
    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::InvalidInput("measurement has no array points".into()));
        }
        if self.points.len() != self.values.len() {
            return Err(Error::InvalidInput(format!(
                "{} points but {} values",
                self.points.len(),
                self.values.len()
            )));
        }
        if let Some(p) = &self.pedestals {
            if p.len() != self.values.len() {
                return Err(Error::InvalidInput("pedestal count differs from value count".into()));
            }
        }
        if let Some(v) = self.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidInput(format!("measured value {v} is not a finite non-negative number")));
        }
        if !(self.n_mean > 0.0) || !self.n_mean.is_finite() {
            return Err(Error::InvalidInput(format!("n_mean must be positive, got {}", self.n_mean)));
        }
        Ok(())
    }

    /// Heterodyne part of each value (pedestal removed).
    pub fn heterodyne_values(&self) -> Vec<f64> {
        match &self.pedestals {
            Some(p) => self.values.iter().zip(p).map(|(v, p)| v - p).collect(),
            None => self.values.clone(),
        }
    }
}

/// Simulate the array correlations for a known photon mode.
#[allow(clippy::too_many_arguments)]
pub fn synthesize_array(
    lo: &LoState,
    u_lo: &TransverseMode,
    u_ph: &TransverseMode,
    ref_point: Point,
    points: &[Point],
    noise: NoiseSpec,
    seed: u64,
) -> Result<ArrayMeasurement> {
    synthesize(lo, u_lo, u_ph, ref_point, points, noise, seed, false)
}

/// As [`synthesize_array`], with the LO-only term added to every value and
/// recorded as a known pedestal.
#[allow(clippy::too_many_arguments)]
pub fn synthesize_array_with_pedestal(
    lo: &LoState,
    u_lo: &TransverseMode,
    u_ph: &TransverseMode,
    ref_point: Point,
    points: &[Point],
    noise: NoiseSpec,
    seed: u64,
) -> Result<ArrayMeasurement> {
    synthesize(lo, u_lo, u_ph, ref_point, points, noise, seed, true)
}

#[allow(clippy::too_many_arguments)]
fn synthesize(
    lo: &LoState,
    u_lo: &TransverseMode,
    u_ph: &TransverseMode,
    ref_point: Point,
    points: &[Point],
    noise: NoiseSpec,
    seed: u64,
    pedestal: bool,
) -> Result<ArrayMeasurement> {
    noise.validate()?;
    lo.validate()?;
    u_lo.validate()?;
    u_ph.validate()?;
    if points.is_empty() {
        return Err(Error::InvalidInput("no array points".into()));
    }
    let b = u_lo.eval(ref_point.x, ref_point.y);
    if b.abs() <= MIN_ANCHOR_AMPLITUDE {
        return Err(Error::DegenerateAnchor(b.abs()));
    }
    let (n_mean, n2fact) = lo.moments();
    let pedestals: Option<Vec<f64>> = pedestal.then(|| {
        points
            .iter()
            .map(|r| {
                let l = b * u_lo.eval(r.x, r.y);
                n2fact * l * l
            })
            .collect()
    });
    let mut values: Vec<f64> = points
        .iter()
        .map(|&r| w2_heterodyne(u_lo, u_ph, ref_point, r, n_mean))
        .collect();
    if let Some(p) = &pedestals {
        values.iter_mut().zip(p).for_each(|(v, p)| *v += p);
    }
    apply_noise(&mut values, noise, seed)?;

    Ok(ArrayMeasurement {
        ref_point,
        points: points.to_vec(),
        values,
        n_mean,
        noise,
        pedestals,
    })
}

fn apply_noise(values: &mut [f64], noise: NoiseSpec, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match noise {
        NoiseSpec::None => {}
        NoiseSpec::Gaussian { sigma } => {
            for v in values.iter_mut() {
                let g: f64 = StandardNormal.sample(&mut rng);
                *v = (*v * (1.0 + sigma * g)).max(0.0);
            }
        }
        NoiseSpec::Counts { events } => {
            let peak = values.iter().copied().fold(0.0, f64::max);
            if peak > 0.0 {
                let per_event = peak / events as f64;
                for v in values.iter_mut() {
                    let mean = *v / per_event;
                    let k = if mean > 0.0 {
                        Poisson::new(mean)
                            .map_err(|e| Error::NumericalDomain(format!("poisson mean {mean}: {e}")))?
                            .sample(&mut rng)
                    } else {
                        0.0
                    };
                    *v = k * per_event;
                }
            }
        }
    }
    Ok(())
}

/// Estimated photon amplitudes at the array points.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedProfile {
    pub points: Vec<Point>,
    pub amplitudes: Vec<f64>,
    /// RMS of `|b U_m - a_m p| - rho_m` over the array.
    pub residual: f64,
    /// Photon amplitude at the reference point, `p`.
    pub anchor_value: f64,
    pub sign_convention: String,
}

/// Recover `U_ph` at the array points from a measurement and the known LO mode.
pub fn reconstruct(meas: &ArrayMeasurement, u_lo: &TransverseMode, anchor: Option<f64>) -> Result<ReconstructedProfile> {
    meas.validate()?;
    u_lo.validate()?;
    if let Some(p) = anchor {
        if !p.is_finite() {
            return Err(Error::invalid("anchor", "must be finite"));
        }
    }
    let r0 = meas.ref_point;
    let b = u_lo.eval(r0.x, r0.y);
    if b.abs() <= MIN_ANCHOR_AMPLITUDE {
        return Err(Error::DegenerateAnchor(b.abs()));
    }
    let a: Vec<f64> = meas.points.iter().map(|r| u_lo.eval(r.x, r.y)).collect();
    let rho: Vec<f64> = meas
        .heterodyne_values()
        .iter()
        .map(|&w| (w.max(0.0) / meas.n_mean).sqrt())
        .collect();

    let mut signs = continuity_signs(r0, &meas.points, &rho);

    // <a, s rho> decides both the LO content and the branch choice.
    let lo_content = |signs: &[f64]| -> f64 { a.iter().zip(&rho).zip(signs).map(|((a, r), s)| a * s * r).sum() };

    let (p, sign_convention) = match anchor {
        Some(p) => {
            // U and its reflection 2 (a/b) p - U both fit; keep the one with less LO content.
            if p * lo_content(&signs) > 0.0 {
                signs.iter_mut().for_each(|s| *s = -*s);
            }
            (p, format!("global sign fixed by anchor U_ph(ref) = {p}"))
        }
        None => {
            let norm: f64 = a.iter().map(|a| a * a).sum();
            let p = if norm > 0.0 { -lo_content(&signs) / norm } else { 0.0 };
            let amps = amplitudes(&a, &rho, &signs, b, p);
            let peak = amps
                .iter()
                .copied()
                .max_by(|x, y| x.abs().total_cmp(&y.abs()))
                .unwrap_or(0.0);
            if peak < 0.0 {
                signs.iter_mut().for_each(|s| *s = -*s);
                (-p, "largest-magnitude amplitude taken positive".to_string())
            } else {
                (p, "largest-magnitude amplitude taken positive".to_string())
            }
        }
    };

    let amps = amplitudes(&a, &rho, &signs, b, p);
    if amps.iter().any(|u| !u.is_finite()) {
        return Err(Error::NumericalDomain("reconstructed amplitude is not finite".into()));
    }
    let residual = rms_misfit(&amps, &a, &rho, b, p);

    Ok(ReconstructedProfile {
        points: meas.points.clone(),
        amplitudes: amps,
        residual,
        anchor_value: p,
        sign_convention,
    })
}

fn amplitudes(a: &[f64], rho: &[f64], signs: &[f64], b: f64, p: f64) -> Vec<f64> {
    a.iter()
        .zip(rho)
        .zip(signs)
        .map(|((a, r), s)| (a * p + s * r) / b)
        .collect()
}

/// RMS of `|b U_m - a_m p| - rho_m`.
pub fn rms_misfit(amplitudes: &[f64], a: &[f64], rho: &[f64], b: f64, p: f64) -> f64 {
    let n = amplitudes.len().max(1) as f64;
    let ss: f64 = amplitudes
        .iter()
        .zip(a)
        .zip(rho)
        .map(|((u, a), r)| {
            let e = (b * u - a * p).abs() - r;
            e * e
        })
        .sum();
    (ss / n).sqrt()
}

/// Cap on refinement sweeps over the sign pattern of scattered arrays.
const MAX_SWEEPS: usize = 50;
const GREEDY_NEIGHBOURS: usize = 6;
const REFINE_NEIGHBOURS: usize = 12;

/// Branch signs `s_m` of `g_m = b U_m - a_m p = s_m rho_m`, up to a global
/// flip. `g` is smooth and vanishes at the reference point.
fn continuity_signs(r0: Point, points: &[Point], rho: &[f64]) -> Vec<f64> {
    match line_direction(points) {
        Some(dir) if points.len() > 1 => line_signs(r0, points, rho, dir),
        _ => scattered_signs(r0, points, rho),
    }
}

/// Collinear array: the sign sequence minimizing the summed squared error
/// of cubic extrapolation along the line, found by dynamic programming over
/// the last three signs. The reference joins the sequence with value 0
/// when it lies on the line.
fn line_signs(r0: Point, points: &[Point], rho: &[f64], (c, s): (f64, f64)) -> Vec<f64> {
    let origin = points[0];
    let along = |q: &Point| (q.x - origin.x) * c + (q.y - origin.y) * s;
    let across = |q: &Point| -(q.x - origin.x) * s + (q.y - origin.y) * c;
    let extent = points.iter().map(|q| along(q).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);

    // (coordinate, rho, index into points)
    let mut nodes: Vec<(f64, f64, Option<usize>)> =
        points.iter().enumerate().map(|(i, q)| (along(q), rho[i], Some(i))).collect();
    let t0 = along(&r0);
    let ref_on_line = across(&r0).abs() <= 1e-9 * extent;
    if ref_on_line && nodes.iter().all(|n| (n.0 - t0).abs() > 1e-12 * extent) {
        nodes.push((t0, 0.0, None));
    }
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));

    let n = nodes.len();
    let mut signs = vec![1.0; points.len()];
    if n < 4 {
        return signs;
    }
    let sign_of = |bit: usize| if bit == 1 { -1.0 } else { 1.0 };

    // State after node k: bits (s_k, s_{k-1}, s_{k-2}) as bits 0, 1, 2.
    let mut cost = [0.0f64; 8];
    // s_0 is fixed to +1 to remove the global flip.
    for (state, c) in cost.iter_mut().enumerate() {
        if state & 0b100 != 0 {
            *c = f64::INFINITY;
        }
    }
    let mut back: Vec<[usize; 8]> = Vec::with_capacity(n);
    for k in 3..n {
        let mut next = [f64::INFINITY; 8];
        let mut from = [0usize; 8];
        for (state, &c_prev) in cost.iter().enumerate() {
            if !c_prev.is_finite() {
                continue;
            }
            let prev: Vec<(f64, f64)> = (0..3)
                .map(|j| {
                    let node = nodes[k - 1 - j];
                    (node.0, sign_of((state >> j) & 1) * node.1)
                })
                .collect();
            let predicted = extrapolate(&prev, nodes[k].0);
            for bit in 0..2 {
                let e = sign_of(bit) * nodes[k].1 - predicted;
                let total = c_prev + e * e;
                let new_state = ((state << 1) | bit) & 0b111;
                if total < next[new_state] {
                    next[new_state] = total;
                    from[new_state] = state;
                }
            }
        }
        cost = next;
        back.push(from);
    }

    let mut state = (0..8).min_by(|&a, &b| cost[a].total_cmp(&cost[b])).unwrap_or(0);
    let mut node_signs = vec![1.0; n];
    for k in (3..n).rev() {
        node_signs[k] = sign_of(state & 1);
        state = back[k - 3][state];
    }
    for j in 0..3 {
        node_signs[2 - j] = sign_of((state >> j) & 1);
    }
    for (node, sgn) in nodes.iter().zip(node_signs) {
        if let Some(i) = node.2 {
            signs[i] = sgn;
        }
    }
    signs
}

/// Quadratic through three `(t, value)` samples evaluated at `t`; repeated
/// abscissae fall back to the most recent value.
fn extrapolate(prev: &[(f64, f64)], t: f64) -> f64 {
    let [(t1, v1), (t2, v2), (t3, v3)] = [prev[0], prev[1], prev[2]];
    if t1 == t2 || t2 == t3 || t1 == t3 {
        return v1;
    }
    v1 * (t - t2) * (t - t3) / ((t1 - t2) * (t1 - t3))
        + v2 * (t - t1) * (t - t3) / ((t2 - t1) * (t2 - t3))
        + v3 * (t - t1) * (t - t2) / ((t3 - t1) * (t3 - t2))
}

/// Scattered array: a greedy pass in order of distance from the reference
/// extrapolates from a local plane fit; refinement sweeps re-decide each
/// sign from a quadratic fit through its neighbours until nothing changes.
fn scattered_signs(r0: Point, points: &[Point], rho: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| points[i].distance(&r0).total_cmp(&points[j].distance(&r0)));

    let mut signs = vec![1.0; points.len()];
    let mut resolved: Vec<(Point, f64)> = Vec::with_capacity(points.len() + 1);
    resolved.push((r0, 0.0));
    for &idx in &order {
        let prediction = local_fit(&nearest(&resolved, points[idx], GREEDY_NEIGHBOURS), points[idx], 1);
        signs[idx] = pick_sign(prediction, rho[idx]);
        resolved.push((points[idx], signs[idx] * rho[idx]));
    }

    for _ in 0..MAX_SWEEPS {
        let mut changed = false;
        for &idx in &order {
            let others: Vec<(Point, f64)> = std::iter::once((r0, 0.0))
                .chain(
                    points
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != idx)
                        .map(|(j, &q)| (q, signs[j] * rho[j])),
                )
                .collect();
            let prediction = local_fit(&nearest(&others, points[idx], REFINE_NEIGHBOURS), points[idx], 2);
            let s = pick_sign(prediction, rho[idx]);
            if s != signs[idx] {
                signs[idx] = s;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    signs
}

fn pick_sign(prediction: f64, rho: f64) -> f64 {
    if (prediction + rho).abs() < (prediction - rho).abs() {
        -1.0
    } else {
        1.0
    }
}

fn nearest(samples: &[(Point, f64)], at: Point, k: usize) -> Vec<(Point, f64)> {
    let mut v = samples.to_vec();
    v.sort_by(|x, y| x.0.distance(&at).total_cmp(&y.0.distance(&at)));
    v.truncate(k);
    v
}

/// Unit direction of the line through `points`, if they are collinear.
fn line_direction(points: &[Point]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |(sx, sy), q| (sx + q.x / n, sy + q.y / n));
    let (mut cxx, mut cxy, mut cyy) = (0.0, 0.0, 0.0);
    for q in points {
        cxx += (q.x - mx) * (q.x - mx);
        cxy += (q.x - mx) * (q.y - my);
        cyy += (q.y - my) * (q.y - my);
    }
    let tr = cxx + cyy;
    let det = cxx * cyy - cxy * cxy;
    let lambda_max = 0.5 * tr + (0.25 * tr * tr - det).max(0.0).sqrt();
    let lambda_min = tr - lambda_max;
    if lambda_min <= 1e-10 * lambda_max {
        let theta = 0.5 * (2.0 * cxy).atan2(cxx - cyy);
        Some((theta.cos(), theta.sin()))
    } else {
        None
    }
}

/// Value at `at` of a least-squares bivariate polynomial of total degree up
/// to `degree` through `samples`, lowered until the samples determine it.
fn local_fit(samples: &[(Point, f64)], at: Point, degree: usize) -> f64 {
    if samples.len() < 2 {
        return samples.first().map_or(0.0, |s| s.1);
    }
    let scale = samples.iter().map(|(q, _)| q.distance(&at)).fold(0.0, f64::max);
    if scale == 0.0 {
        return samples[0].1;
    }
    let mut deg = degree;
    while deg > 0 && (deg + 1) * (deg + 2) / 2 > samples.len() {
        deg -= 1;
    }
    let basis: Vec<Vec<f64>> = samples
        .iter()
        .map(|(q, _)| {
            let (x, y) = ((q.x - at.x) / scale, (q.y - at.y) / scale);
            let mut row = Vec::new();
            for total in 0..=deg {
                for ky in 0..=total {
                    row.push(x.powi((total - ky) as i32) * y.powi(ky as i32));
                }
            }
            row
        })
        .collect();

    let design = DMatrix::from_fn(basis.len(), basis[0].len(), |i, j| basis[i][j]);
    let rhs = DVector::from_iterator(samples.len(), samples.iter().map(|(_, v)| *v));
    match design.svd(true, true).solve(&rhs, 1e-12) {
        // Every basis function but the constant vanishes at `at`.
        Ok(coef) if coef[0].is_finite() => coef[0],
        _ => nearest(samples, at, 1)[0].1,
    }
}
