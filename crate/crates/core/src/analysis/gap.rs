//! Spectrum of the averaging operator `T = (1/k) Σ_s A_s` on the harmonics of `S^2`,
//! where `A_s f(x) = f(x)/2 + (f(xs) + f(xs⁻¹))/4`.
//!
//! Each `A_s` commutes with the Laplacian, so `T` preserves every degree-`d`
//! eigenspace. Its matrix there is assembled in a real orthonormal basis by product
//! quadrature, which is exact for the polynomial integrands involved.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::geometry::{GeneratorSet, Rotation};
use crate::quadrature::SphereGrid;
use crate::Scalar;

pub const MAX_GAP_DEGREE: usize = 20;

/// Number of latitude nodes needed for `max_degree`.
pub fn required_resolution(max_degree: usize) -> usize {
    2 * max_degree + 2
}

/// Real spherical harmonics of degrees `0..=max_degree` at a unit vector of `R^3`,
/// orthonormal for the uniform probability measure. Entry `d² + d + m` holds
/// `Y_{d,m}` (`m < 0` are the sine terms).
pub fn real_harmonics<T: Scalar>(max_degree: usize, p: &[T], out: &mut [T]) {
    let l_max = max_degree;
    debug_assert!(out.len() >= (l_max + 1) * (l_max + 1));
    let z = p[2].clamp_unit();
    let s = (p[0] * p[0] + p[1] * p[1]).sqrt();
    let (cos_phi, sin_phi) = if s > T::zero() {
        (p[0] / s, p[1] / s)
    } else {
        (T::one(), T::zero())
    };
    let sqrt2 = T::of(std::f64::consts::SQRT_2);

    // cos(mφ), sin(mφ) by angle addition
    let mut cm = vec![T::one(); l_max + 1];
    let mut sm = vec![T::zero(); l_max + 1];
    for m in 1..=l_max {
        cm[m] = cm[m - 1] * cos_phi - sm[m - 1] * sin_phi;
        sm[m] = sm[m - 1] * cos_phi + cm[m - 1] * sin_phi;
    }

    // Normalized associated Legendre functions: pbar[l][m] = sqrt((2l+1)(l-m)!/(l+m)!) P_l^m
    let mut diag = T::one();
    for m in 0..=l_max {
        if m > 0 {
            diag *= s * T::of(((2 * m + 1) as f64 / (2 * m) as f64).sqrt());
        }
        let mut prev2 = T::zero();
        let mut prev = diag;
        for l in m..=l_max {
            let val = if l == m {
                diag
            } else if l == m + 1 {
                T::of(((2 * m + 3) as f64).sqrt()) * z * diag
            } else {
                let (lf, mf) = (l as f64, m as f64);
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
                T::of(a) * (z * prev - T::of(b) * prev2)
            };
            if l > m {
                prev2 = prev;
                prev = val;
            }
            let centre = l * l + l;
            if m == 0 {
                out[centre] = val;
            } else {
                out[centre + m] = sqrt2 * val * cm[m];
                out[centre - m] = sqrt2 * val * sm[m];
            }
        }
    }
}

/// Matrix of `T` on each degree `1..=max_degree`, entry `(i, j) = <T φ_j, φ_i>`.
pub fn averaging_operator_blocks<T: Scalar>(
    gens: &GeneratorSet<T>,
    max_degree: usize,
    resolution: usize,
) -> Result<Vec<DMatrix<T>>> {
    if gens.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            found: gens.dim(),
            supported: "2",
        });
    }
    if max_degree == 0 || max_degree > MAX_GAP_DEGREE {
        return Err(invalid(format!(
            "max_degree must lie in 1..={MAX_GAP_DEGREE}, got {max_degree}"
        )));
    }
    let required = required_resolution(max_degree);
    if resolution < required {
        return Err(Error::Resolution {
            given: resolution,
            required,
        });
    }
    let grid = SphereGrid::<T>::new(2, resolution)?;
    let size = (max_degree + 1) * (max_degree + 1);
    let alphabet: Vec<&Rotation<T>> = gens.alphabet().collect();
    let quarter_over_k = T::of(0.25 / gens.k() as f64);
    let half = T::of(0.5);

    let zero_blocks = || -> Vec<DMatrix<T>> {
        (1..=max_degree)
            .map(|d| DMatrix::zeros(2 * d + 1, 2 * d + 1))
            .collect()
    };
    let blocks = (0..grid.len())
        .into_par_iter()
        .fold(
            || (zero_blocks(), vec![T::zero(); size], vec![T::zero(); size], [T::zero(); 3]),
            |(mut blocks, mut here, mut moved, mut y), i| {
                let x = grid.point(i);
                let w = grid.weights()[i];
                real_harmonics(max_degree, x, &mut here);
                let mut avg: Vec<T> = here.iter().map(|&v| half * v).collect();
                for r in &alphabet {
                    r.apply_into(x, &mut y);
                    real_harmonics(max_degree, &y, &mut moved);
                    for (a, &v) in avg.iter_mut().zip(&moved) {
                        *a += quarter_over_k * v;
                    }
                }
                for (b, block) in blocks.iter_mut().enumerate() {
                    let d = b + 1;
                    let off = d * d;
                    for i in 0..2 * d + 1 {
                        let wi = w * here[off + i];
                        for j in 0..2 * d + 1 {
                            block[(i, j)] += wi * avg[off + j];
                        }
                    }
                }
                (blocks, here, moved, y)
            },
        )
        .map(|(blocks, ..)| blocks)
        .reduce(zero_blocks, |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        });
    Ok(blocks)
}

/// Largest eigenvalue of `(1/k) Σ_s A_s` on each degree `1..=max_degree` of `S^2`.
///
/// `resolution` is the number of Gauss–Legendre latitude nodes and must be at least
/// `2 max_degree + 2`.
pub fn averaging_gap<T: Scalar>(
    gens: &GeneratorSet<T>,
    max_degree: usize,
    resolution: usize,
) -> Result<BTreeMap<usize, T>> {
    let blocks = averaging_operator_blocks(gens, max_degree, resolution)?;
    Ok(blocks
        .into_iter()
        .enumerate()
        .map(|(b, m)| {
            let sym = (&m + m.transpose()) * T::of(0.5);
            let top = SymmetricEigen::new(sym)
                .eigenvalues
                .iter()
                .copied()
                .fold(-T::one() - T::one(), |a, v| if v > a { v } else { a });
            (b + 1, top)
        })
        .collect())
}
