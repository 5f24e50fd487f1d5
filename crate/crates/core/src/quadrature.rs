//! Gauss–Legendre rules, adaptive 1-D integration and product grids on `S^2`, `S^3`.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::Scalar;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
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
        Self { nodes, weights }
    }

    /// `∫_a^b f` with this rule mapped onto `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Composite rule over `panels` equal subintervals of `[a, b]`.
    pub fn integrate_composite(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: impl FnMut(f64) -> f64,
    ) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + h * p as f64;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }
}

/// Classical Legendre `P_n(x)` and its derivative.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 1..n {
        let jf = j as f64;
        let p2 = ((2.0 * jf + 1.0) * x * p1 - jf * p0) / (jf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive bisection with a 15-point Gauss–Legendre kernel.
///
/// An interval is accepted once the rule on it and on its two halves agree to the
/// interval's share of `abs_tol`, or at `max_depth`.
pub fn adaptive_integrate(
    a: f64,
    b: f64,
    abs_tol: f64,
    max_depth: u32,
    f: impl Fn(f64) -> f64,
) -> f64 {
    let rule = GaussLegendre::new(15);
    let whole = rule.integrate(a, b, &f);
    adaptive_step(&rule, a, b, whole, abs_tol, max_depth, &f)
}

fn adaptive_step(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    f: &impl Fn(f64) -> f64,
) -> f64 {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(a, mid, f);
    let right = rule.integrate(mid, b, f);
    if depth == 0 || (left + right - whole).abs() <= tol {
        return left + right;
    }
    adaptive_step(rule, a, mid, left, 0.5 * tol, depth - 1, f)
        + adaptive_step(rule, mid, b, right, 0.5 * tol, depth - 1, f)
}

/// Mean of a zonal function `x ↦ f(<x, x0>)` over `S^n` under the uniform measure.
///
/// Reduces to `∫_0^π f(cos θ) sin^{n-1} θ dθ / ∫_0^π sin^{n-1} θ dθ` and integrates
/// in `θ` with a composite Gauss–Legendre rule (`panels` panels of 20 nodes).
pub fn zonal_mean(n: usize, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let rule = GaussLegendre::new(20);
    let weight = |theta: f64| theta.sin().powi(n as i32 - 1);
    let num = rule.integrate_composite(0.0, PI, panels, |th| f(th.cos()) * weight(th));
    let den = rule.integrate_composite(0.0, PI, panels, weight);
    num / den
}

/// Weighted product grid on `S^2` or `S^3`, exact for polynomials of degree below
/// `2 * resolution` under the uniform probability measure.
///
/// On `S^2`: Gauss–Legendre in `z = cos θ` times `2 * resolution` equispaced longitudes.
/// On `S^3`: Hopf coordinates, Gauss–Legendre in `u = sin² η` (the measure is `du dξ1 dξ2`)
/// times equispaced `ξ1`, `ξ2`.
#[derive(Debug, Clone)]
pub struct SphereGrid<T> {
    n: usize,
    coords: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> SphereGrid<T> {
    pub fn new(n: usize, resolution: usize) -> Result<Self> {
        if resolution == 0 {
            return Err(invalid("grid resolution must be positive"));
        }
        let gl = GaussLegendre::new(resolution);
        let m = 2 * resolution;
        let dphi = 2.0 * PI / m as f64;
        let mut coords = Vec::new();
        let mut weights = Vec::new();
        match n {
            2 => {
                for (&z, &w) in gl.nodes.iter().zip(&gl.weights) {
                    let rho = (1.0 - z * z).max(0.0).sqrt();
                    for j in 0..m {
                        let phi = dphi * j as f64;
                        coords.extend([rho * phi.cos(), rho * phi.sin(), z].map(T::of));
                        weights.push(T::of(0.5 * w / m as f64));
                    }
                }
            }
            3 => {
                for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
                    let u = 0.5 * (x + 1.0);
                    let (c, s) = ((1.0 - u).max(0.0).sqrt(), u.max(0.0).sqrt());
                    for i in 0..m {
                        let a = dphi * i as f64;
                        for j in 0..m {
                            let b = dphi * j as f64;
                            coords.extend(
                                [c * a.cos(), c * a.sin(), s * b.cos(), s * b.sin()].map(T::of),
                            );
                            weights.push(T::of(0.5 * w / (m * m) as f64));
                        }
                    }
                }
            }
            _ => {
                return Err(Error::UnsupportedDimension {
                    found: n,
                    supported: "2 or 3",
                })
            }
        }
        Ok(Self { n, coords, weights })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn point(&self, i: usize) -> &[T] {
        let d = self.n + 1;
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.coords.chunks_exact(self.n + 1)
    }

    /// `∫ f dσ` over the sphere.
    pub fn integrate(&self, mut f: impl FnMut(&[T]) -> T) -> T {
        self.points()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (p, &w)| acc + w * f(p))
    }
}
