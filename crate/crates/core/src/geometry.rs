//! Points on `S^n`, rotations in `SO(n+1)` and Haar sampling of rotations.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::Scalar;

/// A point on the unit sphere `S^n`, stored as `n + 1` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector<T> {
    coords: Vec<T>,
}

impl<T: Scalar> UnitVector<T> {
    /// Accepts coordinates that already have unit norm (within `1e-12` for `f64`).
    pub fn new(coords: Vec<T>) -> Result<Self> {
        check_len(coords.len())?;
        let norm = norm(&coords);
        if (norm - T::one()).abs() > T::tol(1e-12) {
            return Err(invalid(format!(
                "coordinates have norm {}, expected 1",
                norm.to_f64_lossy()
            )));
        }
        Ok(Self { coords })
    }

    /// Scales a nonzero vector onto the sphere.
    pub fn normalized(mut coords: Vec<T>) -> Result<Self> {
        check_len(coords.len())?;
        let norm = norm(&coords);
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        for c in &mut coords {
            *c /= norm;
        }
        Ok(Self { coords })
    }

    /// The point `e_{n+1} = (0, ..., 0, 1)`.
    pub fn north_pole(n: usize) -> Result<Self> {
        Self::basis(n, n)
    }

    /// The standard basis vector `e_{axis+1}` of `S^n`.
    pub fn basis(n: usize, axis: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("sphere dimension must be at least 1"));
        }
        if axis > n {
            return Err(invalid(format!("axis {axis} out of range for S^{n}")));
        }
        let mut coords = vec![T::zero(); n + 1];
        coords[axis] = T::one();
        Ok(Self { coords })
    }

    /// A uniformly distributed point: a normalized standard Gaussian vector.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_len(n + 1)?;
        loop {
            let coords: Vec<T> = (0..=n)
                .map(|_| T::of(StandardNormal.sample(rng)))
                .collect();
            if norm(&coords) > T::tol(1e-300) {
                return Self::normalized(coords);
            }
        }
    }

    pub(crate) fn from_raw(coords: Vec<T>) -> Self {
        Self { coords }
    }

    /// Sphere dimension `n`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    pub fn dot(&self, other: &Self) -> T {
        dot(&self.coords, &other.coords)
    }

    /// Great-circle distance `acos(<x, y>)`, in `[0, pi]`.
    pub fn geodesic(&self, other: &Self) -> T {
        geodesic(&self.coords, &other.coords)
    }

    pub fn antipode(&self) -> Self {
        Self {
            coords: self.coords.iter().map(|&c| -c).collect(),
        }
    }
}

fn check_len(len: usize) -> Result<()> {
    if len < 2 {
        return Err(invalid(format!(
            "a point of S^n needs n + 1 >= 2 coordinates, got {len}"
        )));
    }
    Ok(())
}

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub(crate) fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[inline]
pub(crate) fn geodesic<T: Scalar>(a: &[T], b: &[T]) -> T {
    dot(a, b).clamp_unit().acos()
}

#[inline]
pub(crate) fn renormalize<T: Scalar>(a: &mut [T]) {
    let n = norm(a);
    if n > T::zero() {
        for x in a.iter_mut() {
            *x /= n;
        }
    }
}

/// An element of `SO(n+1)` acting on `S^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation<T: Scalar> {
    matrix: DMatrix<T>,
}

impl<T: Scalar> Rotation<T> {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("sphere dimension must be at least 1"));
        }
        Ok(Self {
            matrix: DMatrix::identity(n + 1, n + 1),
        })
    }

    /// Validates orthogonality (`1e-12`) and orientation (`1e-9`).
    pub fn from_matrix(matrix: DMatrix<T>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() < 2 {
            return Err(invalid(format!(
                "rotation matrix must be square of size >= 2, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let rot = Self { matrix };
        let residual = rot.orthogonality_residual();
        if residual > T::tol(1e-12) {
            return Err(invalid(format!(
                "matrix is not orthogonal (residual {:e})",
                residual.to_f64_lossy()
            )));
        }
        if (rot.determinant() - T::one()).abs() > T::tol(1e-9) {
            return Err(invalid("matrix has determinant -1, not a rotation"));
        }
        Ok(rot)
    }

    /// Rotation of the plane spanned by axes `i < j` by `angle`.
    pub fn givens(n: usize, i: usize, j: usize, angle: T) -> Result<Self> {
        if i >= j || j > n {
            return Err(invalid(format!("bad plane ({i}, {j}) for S^{n}")));
        }
        let mut rot = Self::identity(n)?;
        let (s, c) = angle.sin_cos();
        rot.matrix[(i, i)] = c;
        rot.matrix[(j, j)] = c;
        rot.matrix[(i, j)] = -s;
        rot.matrix[(j, i)] = s;
        Ok(rot)
    }

    /// Planar rotation `[[c, -s], [s, c]]` acting on `S^1`.
    pub fn planar(angle: T) -> Self {
        Self::givens(1, 0, 1, angle).expect("S^1 has the plane (0, 1)")
    }

    /// Sphere dimension `n` (the matrix is `(n+1) x (n+1)`).
    pub fn dim(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    /// `max |R^T R - I|` over entries.
    pub fn orthogonality_residual(&self) -> T {
        let gram = self.matrix.transpose() * &self.matrix;
        let id = DMatrix::<T>::identity(gram.nrows(), gram.ncols());
        (gram - id).amax()
    }

    pub fn determinant(&self) -> T {
        self.matrix.determinant()
    }

    /// `R x`, renormalized onto the sphere.
    pub fn apply(&self, x: &UnitVector<T>) -> Result<UnitVector<T>> {
        if x.coords.len() != self.matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.nrows(),
                found: x.coords.len(),
            });
        }
        let mut out = vec![T::zero(); x.coords.len()];
        self.apply_into(&x.coords, &mut out);
        Ok(UnitVector { coords: out })
    }

    /// Unchecked `out = R x` followed by renormalization. Lengths must match.
    #[inline]
    pub(crate) fn apply_into(&self, x: &[T], out: &mut [T]) {
        let m = &self.matrix;
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = T::zero();
            for (c, &xc) in x.iter().enumerate() {
                acc += m[(r, c)] * xc;
            }
            *o = acc;
        }
        renormalize(out);
    }

    /// The transpose.
    pub fn inverse(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
        }
    }

    /// The product `a * b`: apply `b` first, then `a`.
    pub fn compose(a: &Self, b: &Self) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim() + 1,
                found: b.dim() + 1,
            });
        }
        let mut out = Self {
            matrix: &a.matrix * &b.matrix,
        };
        if out.orthogonality_residual() > T::tol(1e-10) {
            out.matrix = orthonormalize(out.matrix);
        }
        Ok(out)
    }
}

/// Q factor of a QR decomposition with the diagonal of R made positive.
fn orthonormalize<T: Scalar>(m: DMatrix<T>) -> DMatrix<T> {
    let qr = m.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < T::zero() {
            col.neg_mut();
        }
    }
    q
}

/// Draws a Haar-distributed element of `SO(n+1)`.
///
/// A Gaussian matrix is orthonormalized by QR with a positive diagonal in `R`,
/// which is Haar on `O(n+1)`. Reflections are mapped onto `SO(n+1)` by negating
/// the last row.
pub fn sample_haar_rotation<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Rotation<T>> {
    if n == 0 {
        return Err(invalid("sphere dimension must be at least 1"));
    }
    let d = n + 1;
    let gaussian = DMatrix::<T>::from_fn(d, d, |_, _| T::of(StandardNormal.sample(rng)));
    let mut q = orthonormalize(gaussian);
    if q.determinant() < T::zero() {
        q.row_mut(d - 1).neg_mut();
    }
    Ok(Rotation { matrix: q })
}

/// `k` iid Haar rotations together with their inverses, reproducible from a seed.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet<T: Scalar> {
    generators: Vec<Rotation<T>>,
    inverses: Vec<Rotation<T>>,
    seed: u64,
    dim: usize,
}

impl<T: Scalar> GeneratorSet<T> {
    /// Wraps explicitly chosen rotations. `seed` is kept as provenance only.
    pub fn from_rotations(generators: Vec<Rotation<T>>, seed: u64) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| invalid("a generator set needs k >= 1 rotations"))?;
        let dim = first.dim();
        if let Some(bad) = generators.iter().find(|g| g.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim + 1,
                found: bad.dim() + 1,
            });
        }
        let inverses = generators.iter().map(Rotation::inverse).collect();
        Ok(Self {
            generators,
            inverses,
            seed,
            dim,
        })
    }

    pub fn generators(&self) -> &[Rotation<T>] {
        &self.generators
    }

    pub fn inverses(&self) -> &[Rotation<T>] {
        &self.inverses
    }

    pub fn k(&self) -> usize {
        self.generators.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Same set with every generator replaced by its inverse.
    pub fn inverted(&self) -> Self {
        Self {
            generators: self.inverses.clone(),
            inverses: self.generators.clone(),
            seed: self.seed,
            dim: self.dim,
        }
    }

    /// The rotation for a signed, 1-based letter: `+i` is generator `i`, `-i` its inverse.
    pub fn letter(&self, letter: i32) -> Result<&Rotation<T>> {
        let k = self.k();
        let idx = letter.unsigned_abs() as usize;
        if letter == 0 || idx > k {
            return Err(Error::LetterOutOfRange { letter, k });
        }
        Ok(if letter > 0 {
            &self.generators[idx - 1]
        } else {
            &self.inverses[idx - 1]
        })
    }

    /// The `2k` letters in traversal order `+1..+k, -1..-k`.
    pub fn alphabet(&self) -> impl Iterator<Item = &Rotation<T>> + '_ {
        self.generators.iter().chain(self.inverses.iter())
    }

    /// Signed label of position `i` in [`alphabet`](Self::alphabet).
    pub fn letter_label(&self, i: usize) -> i32 {
        let k = self.k();
        if i < k {
            (i + 1) as i32
        } else {
            -((i - k + 1) as i32)
        }
    }
}

/// Deterministic in `(n, k, seed)`; uses a ChaCha20 stream seeded from `seed`.
pub fn sample_generator_set<T: Scalar>(n: usize, k: usize, seed: u64) -> Result<GeneratorSet<T>> {
    if n == 0 {
        return Err(invalid("sphere dimension must be at least 1"));
    }
    if k == 0 {
        return Err(invalid("a generator set needs k >= 1 rotations"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let generators = (0..k)
        .map(|_| sample_haar_rotation(n, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    GeneratorSet::from_rotations(generators, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    #[test]
    fn so2_samples_are_planar_rotations() {
        let mut rng = rng(1);
        for _ in 0..200 {
            let r: Rotation<f64> = sample_haar_rotation(1, &mut rng).unwrap();
            let m = r.matrix();
            assert_abs_diff_eq!(m[(0, 0)], m[(1, 1)], epsilon = 1e-12);
            assert_abs_diff_eq!(m[(0, 1)], -m[(1, 0)], epsilon = 1e-12);
            assert_abs_diff_eq!(m[(0, 0)].hypot(m[(1, 0)]), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn so2_angles_cover_the_circle() {
        let mut rng = rng(2);
        let mut bins = [0usize; 8];
        let samples = 8000;
        for _ in 0..samples {
            let r: Rotation<f64> = sample_haar_rotation(1, &mut rng).unwrap();
            let angle = r.matrix()[(1, 0)].atan2(r.matrix()[(0, 0)]).rem_euclid(2.0 * PI);
            bins[(angle / (2.0 * PI) * 8.0) as usize % 8] += 1;
        }
        // 1000 expected per bin, sd ~ 30
        for b in bins {
            assert!((850..1150).contains(&b), "bins {bins:?}");
        }
    }

    #[test]
    fn so3_sample_invariants() {
        for seed in 0..50 {
            let r: Rotation<f64> = sample_haar_rotation(2, &mut rng(seed)).unwrap();
            assert!(r.orthogonality_residual() < 1e-12);
            assert!((r.determinant() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn image_of_pole_has_vanishing_mean() {
        let mut rng = rng(3);
        let pole = UnitVector::<f64>::north_pole(2).unwrap();
        let mut mean = [0.0; 3];
        let samples = 20_000;
        for _ in 0..samples {
            let r: Rotation<f64> = sample_haar_rotation(2, &mut rng).unwrap();
            let y = r.apply(&pole).unwrap();
            for (m, c) in mean.iter_mut().zip(y.coords()) {
                *m += c / samples as f64;
            }
        }
        let norm = mean.iter().map(|m| m * m).sum::<f64>().sqrt();
        assert!(norm < 0.03, "mean norm {norm}");
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(sample_haar_rotation::<f64, _>(0, &mut rng(0)).is_err());
        assert!(sample_generator_set::<f64>(0, 3, 0).is_err());
        assert!(sample_generator_set::<f64>(2, 0, 0).is_err());
    }

    #[test]
    fn generator_sets_are_seed_deterministic() {
        let a = sample_generator_set::<f64>(2, 3, 42).unwrap();
        let b = sample_generator_set::<f64>(2, 3, 42).unwrap();
        let c = sample_generator_set::<f64>(2, 3, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let d = sample_generator_set::<f64>(3, 5, 9).unwrap();
        assert_eq!(d.k(), 5);
        for g in d.generators() {
            assert_eq!(g.dim(), 3);
            assert!(g.orthogonality_residual() < 1e-12);
            assert!((g.determinant() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn apply_identity_and_inverse() {
        let mut rng = rng(5);
        let x = UnitVector::<f64>::random(4, &mut rng).unwrap();
        let id = Rotation::identity(4).unwrap();
        assert_eq!(id.apply(&x).unwrap(), x);

        let r: Rotation<f64> = sample_haar_rotation(4, &mut rng).unwrap();
        let back = r.inverse().apply(&r.apply(&x).unwrap()).unwrap();
        for (a, b) in back.coords().iter().zip(x.coords()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn quarter_turn_maps_e1_to_e2() {
        let r = Rotation::planar(PI / 2.0);
        let y = r.apply(&UnitVector::basis(1, 0).unwrap()).unwrap();
        assert_abs_diff_eq!(y.coords()[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(y.coords()[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn apply_rejects_dimension_mismatch() {
        let r = Rotation::<f64>::identity(2).unwrap();
        let x = UnitVector::north_pole(3).unwrap();
        assert!(matches!(r.apply(&x), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn inverse_properties() {
        let id = Rotation::<f64>::identity(3).unwrap();
        assert_eq!(id.inverse(), id);
        let r: Rotation<f64> = sample_haar_rotation(3, &mut rng(6)).unwrap();
        let prod = r.inverse().matrix() * r.matrix();
        assert!((prod - DMatrix::identity(4, 4)).amax() < 1e-12);
        assert_eq!(r.inverse().inverse(), r);
    }

    #[test]
    fn compose_properties() {
        let r: Rotation<f64> = sample_haar_rotation(2, &mut rng(7)).unwrap();
        let id = Rotation::identity(2).unwrap();
        assert_eq!(Rotation::compose(&r, &id).unwrap(), r);
        let e = Rotation::compose(&r, &r.inverse()).unwrap();
        assert!((e.matrix() - id.matrix()).amax() < 1e-10);

        let (a, b) = (0.3, 1.1);
        let ab = Rotation::compose(&Rotation::planar(a), &Rotation::planar(b)).unwrap();
        assert!((ab.matrix() - Rotation::planar(a + b).matrix()).amax() < 1e-12);

        let other = Rotation::identity(3).unwrap();
        assert!(Rotation::compose(&r, &other).is_err());
    }

    #[test]
    fn compose_repairs_drift() {
        let mut m = Rotation::<f64>::planar(0.4).matrix().clone();
        m[(0, 0)] *= 1.0 + 1e-7;
        let drifted = Rotation { matrix: m };
        let out = Rotation::compose(&drifted, &Rotation::identity(1).unwrap()).unwrap();
        assert!(out.orthogonality_residual() < 1e-12);
    }

    #[test]
    fn from_matrix_validates() {
        let refl = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(Rotation::<f64>::from_matrix(refl).is_err());
        let skew = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(Rotation::<f64>::from_matrix(skew).is_err());
        let ok = Rotation::<f64>::planar(1.0).matrix().clone();
        assert!(Rotation::from_matrix(ok).is_ok());
    }

    #[test]
    fn letters_resolve_to_generators_and_inverses() {
        let g = sample_generator_set::<f64>(2, 2, 1).unwrap();
        assert_eq!(g.letter(2).unwrap(), &g.generators()[1]);
        assert_eq!(g.letter(-1).unwrap(), &g.generators()[0].inverse());
        assert!(g.letter(0).is_err());
        assert!(g.letter(3).is_err());
        let labels: Vec<_> = (0..4).map(|i| g.letter_label(i)).collect();
        assert_eq!(labels, vec![1, 2, -1, -2]);
    }

    #[test]
    fn single_precision_rotations() {
        let r: Rotation<f32> = sample_haar_rotation(3, &mut rng(8)).unwrap();
        assert!(r.orthogonality_residual() < 1e-5);
        let x = UnitVector::<f32>::north_pole(3).unwrap();
        let y = r.apply(&x).unwrap();
        assert!((norm(y.coords()) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn unit_vector_validation() {
        assert!(UnitVector::new(vec![1.0, 0.0]).is_ok());
        assert!(UnitVector::new(vec![1.0, 1e-5]).is_err());
        assert!(UnitVector::new(vec![1.0]).is_err());
        assert!(UnitVector::<f64>::normalized(vec![0.0, 0.0]).is_err());
        let v = UnitVector::normalized(vec![3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(v.coords()[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(v.geodesic(&v.antipode()), PI, epsilon = 1e-12);
    }
}
