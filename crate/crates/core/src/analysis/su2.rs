//! Points of `S^3` as `SU(2)` matrices.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::netgen::SphericalNet;
use crate::Scalar;

/// `[[a + bi, c + di], [-c + di, a - bi]]` for the unit quaternion `(a, b, c, d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Matrix<T>(pub [[Complex<T>; 2]; 2]);

impl<T: Scalar> Su2Matrix<T> {
    pub fn from_quaternion([a, b, c, d]: [T; 4]) -> Self {
        Self([
            [Complex::new(a, b), Complex::new(c, d)],
            [Complex::new(-c, d), Complex::new(a, -b)],
        ])
    }

    /// Inverse of [`from_quaternion`](Self::from_quaternion), reading the first row.
    pub fn to_quaternion(&self) -> [T; 4] {
        let [[u, v], _] = self.0;
        [u.re, u.im, v.re, v.im]
    }

    pub fn det(&self) -> Complex<T> {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// `max |(U U†)_{ij} - δ_ij|`.
    pub fn unitarity_residual(&self) -> T {
        let m = &self.0;
        let mut worst = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = m[i][0] * m[j][0].conj() + m[i][1] * m[j][1].conj();
                if i == j {
                    acc.re -= T::one();
                }
                let r = (acc.re * acc.re + acc.im * acc.im).sqrt();
                if r > worst {
                    worst = r;
                }
            }
        }
        worst
    }

    /// The 8 reals `re, im` of the entries in row-major order.
    pub fn to_flat(&self) -> [T; 8] {
        let m = &self.0;
        [
            m[0][0].re, m[0][0].im, m[0][1].re, m[0][1].im,
            m[1][0].re, m[1][0].im, m[1][1].re, m[1][1].im,
        ]
    }

    pub fn from_flat(v: [T; 8]) -> Self {
        Self([
            [Complex::new(v[0], v[1]), Complex::new(v[2], v[3])],
            [Complex::new(v[4], v[5]), Complex::new(v[6], v[7])],
        ])
    }
}

/// One matrix per distinct net point. The net must live on `S^3`.
pub fn su2_export<T: Scalar>(net: &SphericalNet<T>) -> Result<Vec<Su2Matrix<T>>> {
    if net.dim() != 3 {
        return Err(Error::UnsupportedDimension {
            found: net.dim(),
            supported: "3",
        });
    }
    Ok(net
        .points()
        .iter()
        .map(|p| {
            let c = p.coords();
            Su2Matrix::from_quaternion([c[0], c[1], c[2], c[3]])
        })
        .collect())
}
