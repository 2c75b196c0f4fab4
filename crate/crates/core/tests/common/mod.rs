//! Independent reference computations shared by the integration suites.
//!
//! Nodes and weights come from the `gauss-quad` crate, so nothing here
//! shares a code path with the crate's own quadrature engine.

#![allow(dead_code)]

use gauss_quad::GaussLegendre;
use photonmix::{TransverseMode, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `(node, weight)` pairs of an `n`-point rule mapped to `[a, b]`.
pub fn rule(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let gl = GaussLegendre::new(n).expect("order >= 2");
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    gl.as_node_weight_pairs()
        .iter()
        .map(|&(t, w)| (mid + half * t, half * w))
        .collect()
}

/// Tensor grid over a window: `(x, y, weight)`.
pub fn grid(window: &Window, n: usize) -> Vec<(f64, f64, f64)> {
    let xs = rule(n, window.center_x - window.half_width_x, window.center_x + window.half_width_x);
    let ys = rule(n, window.center_y - window.half_width_y, window.center_y + window.half_width_y);
    let mut out = Vec::with_capacity(n * n);
    for &(x, wx) in &xs {
        for &(y, wy) in &ys {
            out.push((x, y, wx * wy));
        }
    }
    out
}

/// Non-separable 2-D sum of `f` over a window.
pub fn integrate_2d(window: &Window, n: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
    grid(window, n).into_iter().map(|(x, y, w)| w * f(x, y)).sum()
}

/// Brute-force four-dimensional integral of the symmetric-splitter
/// correlation over two windows, `(lo_term, het_term)` in reduced units.
/// The integrand `<n(n-1)> (L1 L2)^2 + <n> (L1 P2 - L2 P1)^2` is summed over
/// every node pair without using any factorization.
pub fn brute_force_w2(
    n_mean: f64,
    n2fact: f64,
    u_lo: &TransverseMode,
    u_ph: &TransverseMode,
    w1: &Window,
    w2: &Window,
    n: usize,
) -> (f64, f64) {
    let sample = |w: &Window| -> Vec<(f64, f64, f64)> {
        grid(w, n)
            .into_iter()
            .map(|(x, y, wt)| (wt, u_lo.eval(x, y), u_ph.eval(x, y)))
            .collect()
    };
    let g1 = sample(w1);
    let g2 = sample(w2);
    let (mut lo, mut het) = (0.0, 0.0);
    for &(wa, l1, p1) in &g1 {
        let (mut lo_row, mut het_row) = (0.0, 0.0);
        for &(wb, l2, p2) in &g2 {
            let ll = l1 * l2;
            let d = l1 * p2 - l2 * p1;
            lo_row += wb * ll * ll;
            het_row += wb * d * d;
        }
        lo += wa * lo_row;
        het += wa * het_row;
    }
    (n2fact * lo, n_mean * het)
}

pub fn random_mode<R: Rng>(rng: &mut R, max_order: u32) -> TransverseMode {
    TransverseMode::new(
        rng.random_range(0..=max_order),
        rng.random_range(0..=max_order),
        rng.random_range(0.6..1.6),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    )
    .unwrap()
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub fn line(n: usize, lo: f64, hi: f64, y: f64) -> Vec<photonmix::Point> {
    (0..n)
        .map(|i| photonmix::Point::new(lo + (hi - lo) * i as f64 / (n - 1) as f64, y))
        .collect()
}

/// A random integrated-correlation scenario with modest windows so that the
/// brute-force oracle stays accurate at moderate node counts.
pub struct IntegratedCase {
    pub lo: photonmix::LoState,
    pub u_lo: TransverseMode,
    pub u_ph: TransverseMode,
    pub w1: Window,
    pub w2: Window,
}

pub fn integrated_cases(count: usize, seed: u64) -> Vec<IntegratedCase> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let lo = if r.random_bool(0.5) {
                photonmix::LoState::Fock(r.random_range(1..4))
            } else {
                photonmix::LoState::coherent_with_intensity(r.random_range(0.2..5.0)).unwrap()
            };
            let mut window = || {
                Window::new(
                    r.random_range(-1.0..1.0),
                    r.random_range(-1.0..1.0),
                    r.random_range(0.5..3.0),
                    r.random_range(0.5..3.0),
                )
                .unwrap()
            };
            let (w1, w2) = (window(), window());
            IntegratedCase {
                lo,
                u_lo: random_mode(&mut r, 2),
                u_ph: random_mode(&mut r, 2),
                w1,
                w2,
            }
        })
        .collect()
}

/// Largest relative deviation of the factorized integral from the
/// brute-force oracle over the given cases.
pub fn worst_factorization_error(cases: &[IntegratedCase], nodes: usize) -> f64 {
    cases
        .iter()
        .map(|c| {
            let d1 = photonmix::Detector::window(c.w1, 1.0).unwrap();
            let d2 = photonmix::Detector::window(c.w2, 1.0).unwrap();
            let got = photonmix::w2_integrated(&c.lo, &c.u_lo, &c.u_ph, &d1, &d2, 1.0).unwrap();
            let (n, n2) = c.lo.moments();
            let (lo, het) = brute_force_w2(n, n2, &c.u_lo, &c.u_ph, &c.w1, &c.w2, nodes);
            relative_error(got.total_reduced, lo + het)
                .max(relative_error(got.lo_term, lo))
                .max((got.het_term - het).abs() / (lo + het))
        })
        .fold(0.0, f64::max)
}

/// `2 <n> / (<n(n-1)> + 2 <n>)`.
pub fn visibility_law(n: f64, n2: f64) -> f64 {
    2.0 * n / (n2 + 2.0 * n)
}

/// Scan grid used for visibility extraction: includes 0 exactly and reaches
/// well past the LO while keeping the photon inside a window of half-width
/// `dmax + 6 w0`.
pub fn visibility_scan(
    lo: &photonmix::LoState,
    waist: f64,
) -> photonmix::HomMetrics {
    let g = TransverseMode::gaussian(waist).unwrap();
    let dmax = 8.0 * waist;
    let xs: Vec<f64> = (0..33).map(|i| -dmax + 2.0 * dmax * i as f64 / 32.0).collect();
    let curve = photonmix::misalignment_scan(lo, &g, &g, dmax + 6.0 * waist, &xs).unwrap();
    photonmix::hom_metrics(&curve).unwrap()
}

pub fn random_lo<R: Rng>(r: &mut R) -> photonmix::LoState {
    if r.random_bool(0.5) {
        photonmix::LoState::Fock(r.random_range(0..6))
    } else {
        photonmix::LoState::Coherent(num_complex::Complex64::new(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)))
    }
}

pub fn random_point<R: Rng>(r: &mut R) -> photonmix::Point {
    photonmix::Point::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0))
}

pub fn random_units<R: Rng>(r: &mut R) -> photonmix::Units {
    photonmix::Units {
        eta: r.random_range(0.1..1.0),
        d_s: r.random_range(0.01..2.0),
        eps: r.random_range(0.5..2.0),
    }
}
