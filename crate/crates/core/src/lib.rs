//! Equidistributed nets on the unit sphere `S^n` built from words in random rotations.
//!
//! A net is the orbit `x0 * S^l` of a base point under all words of length `l` in
//! `k` Haar-random rotations and their inverses. Besides generating nets, the crate
//! measures how good they are: covering radius, harmonic discrepancy, Lipschitz
//! integration error (a lower bound on the 1-Wasserstein distance to the uniform
//! measure) and the spectrum of the averaging operator of the generators.
//!
//! Most numerical code is generic over [`Scalar`], implemented for `f32` and `f64`.
//! The aliases at the crate root pin the `f64` instantiation, which is what the
//! tolerances quoted throughout the docs refer to.
//!
//! ```
//! use spherenet::analysis::{assess, AssessOptions};
//! use spherenet::geometry::{sample_generator_set, UnitVector};
//! use spherenet::netgen::enumerate_net;
//!
//! # fn main() -> spherenet::Result<()> {
//! let gens = sample_generator_set::<f64>(2, 3, 42)?;
//! let x0 = UnitVector::north_pole(2)?;
//! let net = enumerate_net(&gens, 4, &x0, 10_000_000)?;
//! assert_eq!(net.total_weight(), 6u64.pow(4));
//! let report = assess(&net, &AssessOptions { probes: 1000, ..Default::default() })?;
//! assert!(report.covering_radius_est > 0.0);
//! # Ok(())
//! # }
//! ```

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod geometry;
pub mod harmonics;
pub mod netgen;
pub mod params;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type UnitVector = geometry::UnitVector<f64>;
pub type Rotation = geometry::Rotation<f64>;
pub type GeneratorSet = geometry::GeneratorSet<f64>;
pub type SphericalNet = netgen::SphericalNet<f64>;
pub type HeatKernelSeries = harmonics::HeatKernelSeries<f64>;
pub type Su2Matrix = analysis::su2::Su2Matrix<f64>;

pub type UnitVectorF32 = geometry::UnitVector<f32>;
pub type RotationF32 = geometry::Rotation<f32>;
pub type SphericalNetF32 = netgen::SphericalNet<f32>;
