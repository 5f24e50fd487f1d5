//! Quality measures for weighted point sets on `S^n`.

pub mod covering;
pub mod discrepancy;
pub mod gap;
pub mod lipschitz;
pub mod su2;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

pub use covering::{covering_radius, CoveringEstimate};
pub use discrepancy::harmonic_discrepancy;
pub use gap::{averaging_gap, averaging_operator_blocks};
pub use lipschitz::{integration_errors, w1_lower_bound, LipschitzFamily, TestFunction};
pub use su2::{su2_export, Su2Matrix};

use crate::error::Result;
use crate::geometry::UnitVector;
use crate::netgen::{NetMeta, SphericalNet};
use crate::Scalar;

/// Multiplicity-weighted mean `Σ w_i f(x_i)`.
pub fn integrate<T: Scalar>(net: &SphericalNet<T>, f: impl Fn(&UnitVector<T>) -> T) -> T {
    let total = T::of(net.total_weight() as f64);
    net.points()
        .iter()
        .zip(net.multiplicities())
        .fold(T::zero(), |acc, (p, &m)| acc + T::of(m as f64) * f(p))
        / total
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssessOptions {
    pub probes: usize,
    pub max_degree: usize,
    /// Seeds the covering-radius probes.
    pub seed: u64,
}

impl Default for AssessOptions {
    fn default() -> Self {
        Self {
            probes: 100_000,
            max_degree: 6,
            seed: 0,
        }
    }
}

/// Everything measured about one net.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualityReport {
    /// Largest probe-to-net geodesic distance seen (a lower estimate), radians.
    pub covering_radius_est: f64,
    pub covering_probes: usize,
    pub discrepancy: BTreeMap<usize, f64>,
    pub integration_errors: BTreeMap<String, f64>,
    pub w1_lower_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_estimates: Option<BTreeMap<usize, f64>>,
    pub meta: NetMeta,
}

/// Covering radius, harmonic discrepancy and the built-in Lipschitz family.
pub fn assess(net: &SphericalNet<f64>, opts: &AssessOptions) -> Result<QualityReport> {
    let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
    let cover = covering_radius(net, opts.probes, &mut rng)?;
    let discrepancy = harmonic_discrepancy(net, opts.max_degree)?;
    let family = LipschitzFamily::builtin(net.dim())?;
    Ok(QualityReport {
        covering_radius_est: cover.radius,
        covering_probes: cover.probes,
        discrepancy,
        integration_errors: integration_errors(net, &family),
        w1_lower_bound: w1_lower_bound(net, &family),
        gap_estimates: None,
        meta: net.meta().clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn antipodal_pair() -> SphericalNet<f64> {
        let p = UnitVector::normalized(vec![0.3, -0.5, 0.8]).unwrap();
        SphericalNet::from_points(vec![p.clone(), p.antipode()]).unwrap()
    }

    #[test]
    fn integrate_constant_and_odd() {
        let net = antipodal_pair();
        assert_eq!(integrate(&net, |_| 2.5), 2.5);
        for j in 0..3 {
            assert_abs_diff_eq!(integrate(&net, |x| x.coords()[j]), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn distance_to_pole_of_antipodal_pair_is_half_pi() {
        let net = antipodal_pair();
        let pole = UnitVector::north_pole(2).unwrap();
        assert_abs_diff_eq!(integrate(&net, |x| x.geodesic(&pole)), PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn assess_runs() {
        let report = assess(
            &antipodal_pair(),
            &AssessOptions {
                probes: 2000,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(report.covering_radius_est <= PI / 2.0 + 1e-12);
        assert_eq!(report.discrepancy.len(), 6);
        assert!(report.w1_lower_bound >= 0.0 && report.w1_lower_bound <= PI);
    }
}
