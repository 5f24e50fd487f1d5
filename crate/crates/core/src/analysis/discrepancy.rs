//! Harmonic discrepancy through the addition theorem.
//!
//! For an orthonormal basis `φ_1..φ_h` of the degree-`d` harmonics,
//! `Σ_i φ_i(x) φ_i(y) = h_d P_{d,n}(<x, y>)`. The squared norm of the net's mean
//! feature vector is therefore `Σ_{a,b} w_a w_b h_d P_{d,n}(<x_a, x_b>)`, which needs
//! pairwise inner products only.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::geometry::dot;
use crate::harmonics::dim_harmonic;
use crate::netgen::SphericalNet;
use crate::Scalar;

/// Distinct points beyond which the net is resampled.
pub const MAX_DISTINCT_POINTS: usize = 20_000;

/// Stream used for resampling oversized nets (xor-ed with the net's seed).
const SUBSAMPLE_SALT: u64 = 0x5eed_d15c_0000_0001;

/// `D_d` for `1 ≤ d ≤ max_degree`.
///
/// Nets with more than [`MAX_DISTINCT_POINTS`] distinct points are replaced by that
/// many draws (with replacement, probability proportional to multiplicity), which
/// keeps the estimator unbiased for `D_d²` up to an `h_d / m` term.
pub fn harmonic_discrepancy<T: Scalar>(
    net: &SphericalNet<T>,
    max_degree: usize,
) -> Result<BTreeMap<usize, T>> {
    if max_degree == 0 {
        return Err(invalid("max_degree must be at least 1"));
    }
    if net.is_empty() {
        return Err(crate::Error::EmptyNet);
    }
    let n = net.dim();
    let h: Vec<T> = (0..=max_degree)
        .map(|d| dim_harmonic(n, d).map(|h| T::of(h as f64)))
        .collect::<Result<_>>()?;

    let (coords, weights) = if net.len() > MAX_DISTINCT_POINTS {
        subsample(net, MAX_DISTINCT_POINTS)
    } else {
        (
            net.points().iter().flat_map(|p| p.coords().iter().copied()).collect::<Vec<T>>(),
            net.weights(),
        )
    };
    let dim = n + 1;
    let count = weights.len();
    let degrees = max_degree + 1;

    // Recurrence (j+n-1) P_{j+1} = (2j+n-1) t P_j - j P_{j-1}, constants hoisted.
    let rec: Vec<(T, T, T)> = (0..degrees)
        .map(|j| (T::of_usize(2 * j + n - 1), T::of_usize(j), T::of_usize(j + n - 1)))
        .collect();

    // Diagonal: P(1) = 1.
    let diag = weights.iter().fold(T::zero(), |acc, &w| acc + w * w);
    let off = (0..count)
        .into_par_iter()
        .map(|a| {
            let xa = &coords[a * dim..(a + 1) * dim];
            let mut row = vec![T::zero(); degrees];
            for b in a + 1..count {
                let c = dot(xa, &coords[b * dim..(b + 1) * dim]).clamp_unit();
                let wb = weights[b];
                let (mut prev, mut cur) = (T::one(), c);
                row[0] += wb;
                if degrees > 1 {
                    row[1] += wb * c;
                }
                for j in 1..degrees - 1 {
                    let (a, b, den) = rec[j];
                    let next = (a * c * cur - b * prev) / den;
                    prev = cur;
                    cur = next;
                    row[j + 1] += wb * cur;
                }
            }
            let wa = weights[a];
            row.iter_mut().for_each(|r| *r *= wa);
            row
        })
        .reduce(
            || vec![T::zero(); degrees],
            |mut x, y| {
                x.iter_mut().zip(&y).for_each(|(a, &b)| *a += b);
                x
            },
        );

    let two = T::one() + T::one();
    let floor = -T::tol(1e-10);
    Ok((1..=max_degree)
        .map(|d| {
            let q = h[d] * (diag + two * off[d]);
            let q = if q < T::zero() && q >= floor { T::zero() } else { q };
            (d, q.max(T::zero()).sqrt())
        })
        .collect())
}

fn subsample<T: Scalar>(net: &SphericalNet<T>, m: usize) -> (Vec<T>, Vec<T>) {
    let mut rng = ChaCha20Rng::seed_from_u64(net.meta().seed ^ SUBSAMPLE_SALT);
    let dist = WeightedIndex::new(net.multiplicities()).expect("multiplicities are positive");
    let mut coords = Vec::with_capacity(m * (net.dim() + 1));
    for _ in 0..m {
        coords.extend_from_slice(net.points()[dist.sample(&mut rng)].coords());
    }
    (coords, vec![T::one() / T::of_usize(m); m])
}
