//! Covering radius estimated by random probing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::geometry::{dot, UnitVector};
use crate::netgen::SphericalNet;
use crate::Scalar;

/// Nets at least this large are searched through a k-d tree.
pub const BRUTE_FORCE_LIMIT: usize = 10_000;
const PROBE_CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveringEstimate<T> {
    /// `max_probe min_point d(probe, point)`, radians. Never exceeds the true radius.
    pub radius: T,
    pub probes: usize,
}

/// Draws `probes` uniform points and returns the largest geodesic distance from a
/// probe to its nearest net point.
///
/// Probes are generated in fixed-size chunks, each from its own ChaCha stream keyed
/// by one draw from `rng`, so the result does not depend on the thread count.
pub fn covering_radius<T: Scalar, R: Rng + ?Sized>(
    net: &SphericalNet<T>,
    probes: usize,
    rng: &mut R,
) -> Result<CoveringEstimate<T>> {
    if net.is_empty() {
        return Err(Error::EmptyNet);
    }
    if probes == 0 {
        return Err(invalid("need at least one probe"));
    }
    let n = net.dim();
    let d = n + 1;
    let coords: Vec<T> = net.points().iter().flat_map(|p| p.coords().iter().copied()).collect();
    let tree = (net.len() >= BRUTE_FORCE_LIMIT).then(|| KdTree::build(d, &coords));
    let base = rng.next_u64();
    let chunks = probes.div_ceil(PROBE_CHUNK);

    let best_cos = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha20Rng::seed_from_u64(base);
            rng.set_stream(c as u64);
            let count = PROBE_CHUNK.min(probes - c * PROBE_CHUNK);
            let mut worst = T::one();
            for _ in 0..count {
                let x = UnitVector::<T>::random(n, &mut rng).expect("n >= 1");
                let nearest = match &tree {
                    Some(t) => t.max_dot(x.coords()),
                    None => coords
                        .chunks_exact(d)
                        .map(|p| dot(p, x.coords()))
                        .fold(-T::one() - T::one(), |a, b| if b > a { b } else { a }),
                };
                if nearest < worst {
                    worst = nearest;
                }
            }
            worst
        })
        .reduce(T::one, |a, b| if b < a { b } else { a });

    Ok(CoveringEstimate {
        radius: best_cos.clamp_unit().acos(),
        probes,
    })
}

/// Exact nearest-neighbour search over unit vectors (largest inner product is the
/// smallest Euclidean distance).
struct KdTree<'a, T> {
    d: usize,
    coords: &'a [T],
    nodes: Vec<Node<T>>,
    index: Vec<usize>,
}

enum Node<T> {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: T, left: usize, right: usize },
}

const LEAF_SIZE: usize = 16;

impl<'a, T: Scalar> KdTree<'a, T> {
    fn build(d: usize, coords: &'a [T]) -> Self {
        let mut tree = Self {
            d,
            coords,
            nodes: Vec::new(),
            index: (0..coords.len() / d).collect(),
        };
        let len = tree.index.len();
        tree.build_node(0, len);
        tree
    }

    fn coord(&self, i: usize, axis: usize) -> T {
        self.coords[i * self.d + axis]
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return self.nodes.len() - 1;
        }
        let axis = (0..self.d)
            .max_by(|&a, &b| {
                self.spread(start, end, a)
                    .partial_cmp(&self.spread(start, end, b))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(0);
        let mid = start + (end - start) / 2;
        let (coords, d) = (self.coords, self.d);
        self.index[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            coords[a * d + axis]
                .partial_cmp(&coords[b * d + axis])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let value = self.coord(self.index[mid], axis);
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[slot] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        slot
    }

    fn spread(&self, start: usize, end: usize, axis: usize) -> T {
        let mut lo = T::one() + T::one();
        let mut hi = -lo;
        for &i in &self.index[start..end] {
            let v = self.coord(i, axis);
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        hi - lo
    }

    fn max_dot(&self, q: &[T]) -> T {
        let mut best_dist_sq = T::of(5.0);
        self.search(0, q, &mut best_dist_sq);
        // |p - q|^2 = 2 - 2 <p, q> for unit vectors
        T::one() - best_dist_sq / (T::one() + T::one())
    }

    fn search(&self, node: usize, q: &[T], best: &mut T) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.index[start..end] {
                    let p = &self.coords[i * self.d..(i + 1) * self.d];
                    let dist_sq = p
                        .iter()
                        .zip(q)
                        .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
                    if dist_sq < *best {
                        *best = dist_sq;
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < T::zero() { (left, right) } else { (right, left) };
                self.search(near, q, best);
                if diff * diff < *best {
                    self.search(far, q, best);
                }
            }
        }
    }
}
