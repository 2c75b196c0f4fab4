//! Fourth-order intensity correlations between a single photon and a local
//! oscillator (LO) mixed at a beam splitter.
//!
//! The crate covers
//! - Hermite-Gaussian transverse modes and their overlaps ([`modes`]),
//! - the point-detector correlation kernels and LO state moments ([`quantum`]),
//! - finite-window integration, misalignment scans and HOM dip metrics ([`aperture`]),
//! - detector-array synthesis and photon mode reconstruction ([`profiling`]),
//! - scenario files, CSV output and the `photonmix` command line ([`cli`]).
//!
//! All correlation values are computed in reduced units: the physical
//! prefactor `eta^2 dS^2 eps^4` (and the beam-splitter factor for the
//! symmetric preset) is stripped and reapplied only in
//! [`CorrelationResult::total_physical`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aperture;
pub mod cli;
pub mod error;
pub mod modes;
pub mod profiling;
pub mod quantum;

pub use aperture::{
    hom_metrics, misalignment_scan, quad2d, w2_integrated, Detector, DetectorShape, HomMetrics,
    Integrator, QuadEstimate, ScanCurve, ScanGeometry, Window,
};
pub use error::{Error, Result};
pub use modes::{mode_overlap, TransverseMode};
pub use num_complex::Complex64;
pub use profiling::{reconstruct, synthesize_array, ArrayMeasurement, NoiseSpec, ReconstructedProfile};
pub use quantum::{
    lo_moments, w2_heterodyne, w2_point_general, w2_point_symmetric, BeamSplitter,
    CorrelationResult, LoState, Point, Units,
};
