//! Lipschitz test functions and the resulting lower bound on `W_1(net, σ)`.
//!
//! For any 1-Lipschitz `f`, `|∫ f dσ - ∫ f dν| ≤ W_1(σ, ν)`; the maximum over a finite
//! family is therefore a lower bound on the transport distance.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::FRAC_PI_2;
use std::sync::{Mutex, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::analysis::integrate;
use crate::error::{invalid, Result};
use crate::geometry::{geodesic, UnitVector};
use crate::netgen::SphericalNet;
use crate::Scalar;

pub const ANCHOR_COUNT: usize = 20;
pub const PAIR_COUNT: usize = 10;
pub const MONTE_CARLO_SAMPLES: usize = 1_000_000;
const ANCHOR_CANDIDATES: usize = 4000;
const ANCHOR_SEED: u64 = 0xa9c4_0125;
const MONTE_CARLO_SEED: u64 = 0x3c_5eed;

#[derive(Debug, Clone, PartialEq)]
pub enum TestKind<T> {
    /// `x ↦ d(x, a)`.
    DistanceTo(Vec<T>),
    /// `x ↦ x_j`; 1-Lipschitz since the chord is shorter than the arc.
    Coordinate(usize),
    /// `x ↦ min(d(x, a), d(x, b))`.
    MinDistanceToPair(Vec<T>, Vec<T>),
}

/// A 1-Lipschitz function with its mean under the uniform measure.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction<T> {
    pub name: String,
    pub kind: TestKind<T>,
    pub uniform_mean: f64,
    /// Standard error of `uniform_mean` when it is a Monte Carlo estimate, else 0.
    pub uniform_stderr: f64,
}

impl<T: Scalar> TestFunction<T> {
    /// Distance to `anchor`; its uniform mean is `π/2` in every dimension.
    pub fn distance_to(name: impl Into<String>, anchor: &UnitVector<T>) -> Self {
        Self {
            name: name.into(),
            kind: TestKind::DistanceTo(anchor.coords().to_vec()),
            uniform_mean: FRAC_PI_2,
            uniform_stderr: 0.0,
        }
    }

    pub fn coordinate(j: usize) -> Self {
        Self {
            name: format!("coord[{j}]"),
            kind: TestKind::Coordinate(j),
            uniform_mean: 0.0,
            uniform_stderr: 0.0,
        }
    }

    pub fn eval(&self, x: &[T]) -> T {
        match &self.kind {
            TestKind::DistanceTo(a) => geodesic(x, a),
            TestKind::Coordinate(j) => x[*j],
            TestKind::MinDistanceToPair(a, b) => {
                let (da, db) = (geodesic(x, a), geodesic(x, b));
                if da < db {
                    da
                } else {
                    db
                }
            }
        }
    }

    /// `|∫ f dσ - ∫ f dν|`.
    pub fn error(&self, net: &SphericalNet<T>) -> f64 {
        (self.uniform_mean - integrate(net, |x| self.eval(x.coords())).to_f64_lossy()).abs()
    }
}

/// A finite set of 1-Lipschitz test functions on `S^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzFamily<T> {
    n: usize,
    members: Vec<TestFunction<T>>,
}

impl<T: Scalar> LipschitzFamily<T> {
    pub fn new(n: usize, members: Vec<TestFunction<T>>) -> Result<Self> {
        if members.is_empty() {
            return Err(invalid("a test family needs at least one member"));
        }
        Ok(Self { n, members })
    }

    /// Distances to [`ANCHOR_COUNT`] spread-out anchors (the first is the north
    /// pole), the `n + 1` coordinate functions, and [`PAIR_COUNT`] two-anchor minimum
    /// distances whose uniform means are Monte Carlo estimates, cached per `n`.
    pub fn builtin(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("sphere dimension must be at least 1"));
        }
        let anchors = spread_anchors(n);
        let mut members: Vec<TestFunction<T>> = anchors
            .iter()
            .enumerate()
            .map(|(i, a)| TestFunction {
                name: format!("dist[{i}]"),
                kind: TestKind::DistanceTo(a.iter().map(|&c| T::of(c)).collect()),
                uniform_mean: FRAC_PI_2,
                uniform_stderr: 0.0,
            })
            .collect();
        members.extend((0..=n).map(TestFunction::coordinate));
        for (i, &(mean, se)) in pair_means(n).iter().enumerate() {
            let (a, b) = pair_anchors(&anchors, i);
            members.push(TestFunction {
                name: format!("mindist[{i}]"),
                kind: TestKind::MinDistanceToPair(
                    a.iter().map(|&c| T::of(c)).collect(),
                    b.iter().map(|&c| T::of(c)).collect(),
                ),
                uniform_mean: mean,
                uniform_stderr: se,
            });
        }
        Ok(Self { n, members })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[TestFunction<T>] {
        &self.members
    }

    pub fn with(mut self, f: TestFunction<T>) -> Self {
        self.members.push(f);
        self
    }
}

/// Per-member `|∫ f dσ - ∫ f dν|`, keyed by name.
pub fn integration_errors<T: Scalar>(net: &SphericalNet<T>, family: &LipschitzFamily<T>) -> BTreeMap<String, f64> {
    family
        .members()
        .iter()
        .map(|f| (f.name.clone(), f.error(net)))
        .collect()
}

/// `max_f |∫ f dσ - ∫ f dν|` over the family, a lower bound on `W_1`.
///
/// Members with Monte Carlo reference means contribute `|error| - 3 se` (floored at
/// zero) so that sampling noise in the reference cannot inflate the bound.
pub fn w1_lower_bound<T: Scalar>(net: &SphericalNet<T>, family: &LipschitzFamily<T>) -> f64 {
    family
        .members()
        .iter()
        .map(|f| (f.error(net) - 3.0 * f.uniform_stderr).max(0.0))
        .fold(0.0, f64::max)
}

fn pair_anchors(anchors: &[Vec<f64>], i: usize) -> (&[f64], &[f64]) {
    (&anchors[i], &anchors[i + PAIR_COUNT])
}

/// Greedy farthest-point selection from seeded uniform candidates, starting at the
/// north pole.
fn spread_anchors(n: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha20Rng::seed_from_u64(ANCHOR_SEED ^ n as u64);
    let candidates: Vec<Vec<f64>> = (0..ANCHOR_CANDIDATES)
        .map(|_| UnitVector::<f64>::random(n, &mut rng).expect("n >= 1").into_coords())
        .collect();
    let mut anchors = vec![UnitVector::<f64>::north_pole(n).expect("n >= 1").into_coords()];
    let mut nearest: Vec<f64> = candidates.iter().map(|c| geodesic(c, &anchors[0])).collect();
    while anchors.len() < ANCHOR_COUNT {
        let (best, _) = nearest
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
        let chosen = candidates[best].clone();
        for (d, c) in nearest.iter_mut().zip(&candidates) {
            *d = d.min(geodesic(c, &chosen));
        }
        anchors.push(chosen);
    }
    anchors
}

type MeanCache = Mutex<HashMap<usize, Vec<(f64, f64)>>>;

/// Uniform means (and standard errors) of the pair functions, estimated once per `n`.
fn pair_means(n: usize) -> Vec<(f64, f64)> {
    static CACHE: OnceLock<MeanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("cache lock").get(&n) {
        return v.clone();
    }
    let anchors = spread_anchors(n);
    const CHUNKS: usize = 64;
    let per_chunk = MONTE_CARLO_SAMPLES / CHUNKS;
    let sums: Vec<(f64, f64)> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha20Rng::seed_from_u64(MONTE_CARLO_SEED ^ n as u64);
            rng.set_stream(c as u64);
            let mut acc = vec![(0.0, 0.0); PAIR_COUNT];
            for _ in 0..per_chunk {
                let x = UnitVector::<f64>::random(n, &mut rng).expect("n >= 1");
                for (i, s) in acc.iter_mut().enumerate() {
                    let (a, b) = pair_anchors(&anchors, i);
                    let v = geodesic(x.coords(), a).min(geodesic(x.coords(), b));
                    s.0 += v;
                    s.1 += v * v;
                }
            }
            acc
        })
        .reduce(
            || vec![(0.0, 0.0); PAIR_COUNT],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    a.0 += b.0;
                    a.1 += b.1;
                }
                x
            },
        );
    let m = (per_chunk * CHUNKS) as f64;
    let out: Vec<(f64, f64)> = sums
        .into_iter()
        .map(|(s, s2)| {
            let mean = s / m;
            let var = (s2 / m - mean * mean).max(0.0) * m / (m - 1.0);
            (mean, (var / m).sqrt())
        })
        .collect();
    cache.lock().expect("cache lock").insert(n, out.clone());
    out
}
