//! Spherical harmonic bookkeeping on `S^n`: eigenspace dimensions, Legendre
//! polynomials `P_{k,n}`, the truncated heat kernel and the Hecke–Funk coefficients
//! of the chordal distance.
//!
//! By the addition theorem every zonal quantity reduces to one variable, the cosine
//! `c = <x, x0>`, so no explicit harmonic basis is needed in general dimension.

use crate::error::{domain, Error, Result};
use crate::params::compute_a_n;
use crate::quadrature::{adaptive_integrate, zonal_mean};
use crate::Scalar;

/// Dimension and Laplace–Beltrami eigenvalue of the degree-`k` harmonics on `S^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarmonicSpec {
    pub n: usize,
    pub k: usize,
    pub h_k: u64,
    pub lambda_k: u64,
}

impl HarmonicSpec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let h_k = dim_harmonic(n, k)?;
        let lambda_k = eigenvalue(n, k)?;
        Ok(Self { n, k, h_k, lambda_k })
    }
}

/// `λ_k = k (n + k - 1)`.
pub fn eigenvalue(n: usize, k: usize) -> Result<u64> {
    let (n, k) = (n as u64, k as u64);
    (n + k)
        .checked_sub(1)
        .and_then(|m| k.checked_mul(m))
        .ok_or_else(|| Error::Overflow(format!("lambda_{k} on S^{n}")))
}

fn eigenvalue_f64(n: usize, k: usize) -> f64 {
    k as f64 * (n + k) as f64 - k as f64
}

/// Exact binomial coefficient, `0` when `m < r`.
pub fn binomial(m: u64, r: u64) -> Result<u64> {
    if r > m {
        return Ok(0);
    }
    let r = r.min(m - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (m - i) is divisible by (i + 1) since acc = C(m, i).
        acc = acc
            .checked_mul((m - i) as u128)
            .ok_or_else(|| Error::Overflow(format!("C({m}, {r})")))?
            / (i as u128 + 1);
    }
    u64::try_from(acc).map_err(|_| Error::Overflow(format!("C({m}, {r})")))
}

/// `h_k = C(n+k, n) - C(n+k-2, n)`, in exact integer arithmetic.
pub fn dim_harmonic(n: usize, k: usize) -> Result<u64> {
    if n == 0 {
        return Err(domain("sphere dimension must be at least 1"));
    }
    let (n64, k64) = (n as u64, k as u64);
    let top = n64
        .checked_add(k64)
        .ok_or_else(|| Error::Overflow(format!("h_{k} on S^{n}")))?;
    let a = binomial(top, n64)?;
    let b = if top >= 2 { binomial(top - 2, n64)? } else { 0 };
    Ok(a - b)
}

/// `h_k` as a float; falls back to log-gamma when the exact value overflows.
fn dim_harmonic_f64(n: usize, k: usize) -> f64 {
    match dim_harmonic(n, k) {
        Ok(h) => h as f64,
        Err(_) => {
            // h_k = (2k + n - 1) (k + n - 2)! / (k! (n - 1)!)
            use statrs::function::gamma::ln_gamma;
            let (n, k) = (n as f64, k as f64);
            ((2.0 * k + n - 1.0).ln() + ln_gamma(k + n - 1.0) - ln_gamma(k + 1.0) - ln_gamma(n))
                .exp()
        }
    }
}

/// `Σ_{a=0}^{k} h_a(S^n) == h_k(S^{n+1})`.
pub fn cumulative_dim_identity_check(n: usize, k: usize) -> Result<bool> {
    let mut sum: u64 = 0;
    for a in 0..=k {
        sum = sum
            .checked_add(dim_harmonic(n, a)?)
            .ok_or_else(|| Error::Overflow(format!("sum of h_a on S^{n} up to {k}")))?;
    }
    Ok(sum == dim_harmonic(n + 1, k)?)
}

fn check_cosine<T: Scalar>(c: T) -> Result<T> {
    if !(c.abs() <= T::one() + T::tol(1e-12)) {
        return Err(domain(format!(
            "argument {} outside [-1, 1]",
            c.to_f64_lossy()
        )));
    }
    Ok(c.clamp_unit())
}

/// `P_{k,n}(t)`, the degree-`k` Legendre polynomial of dimension `n + 1`, normalized
/// so that `P_{k,n}(1) = 1`. Evaluated by the three-term recurrence
/// `(k+n-1) P_{k+1} = (2k+n-1) t P_k - k P_{k-1}`.
pub fn legendre_eval<T: Scalar>(n: usize, k: usize, t: T) -> Result<T> {
    if n == 0 {
        return Err(domain("sphere dimension must be at least 1"));
    }
    let t = check_cosine(t)?;
    Ok(legendre_unchecked(n, k, t))
}

#[inline]
pub(crate) fn legendre_unchecked<T: Scalar>(n: usize, k: usize, t: T) -> T {
    if k == 0 {
        return T::one();
    }
    let (mut prev, mut cur) = (T::one(), t);
    for j in 1..k {
        let next = (T::of_usize(2 * j + n - 1) * t * cur - T::of_usize(j) * prev)
            / T::of_usize(j + n - 1);
        prev = cur;
        cur = next;
    }
    cur
}

/// Truncated Fourier–Laplace series of the heat kernel `H_t` on `S^n`,
/// `Σ_{k ≤ K} e^{-λ_k t} h_k P_{k,n}(<x, x0>)`.
///
/// Coefficients are stored up to the first degree past the maximum at which
/// `e^{-λ_k t} h_k` underflows to zero; all later ones are zero in floating point
/// and are reported as such by [`coeff`](Self::coeff).
#[derive(Debug, Clone, PartialEq)]
pub struct HeatKernelSeries<T> {
    n: usize,
    t: f64,
    degree_cap: u64,
    coeffs: Vec<T>,
}

impl<T: Scalar> HeatKernelSeries<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Truncation degree `K`.
    pub fn degree_cap(&self) -> u64 {
        self.degree_cap
    }

    /// `e^{-λ_k t} h_k`; zero above the underflow degree, `None` above `K`.
    pub fn coeff(&self, k: u64) -> Option<T> {
        if k > self.degree_cap {
            return None;
        }
        Some(self.coeffs.get(k as usize).copied().unwrap_or_else(T::zero))
    }

    /// Stored (nonzero) coefficients, starting at degree 0.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }
}

/// Builds `H_{t,K}` with `coeffs[k] = exp(-k(n+k-1) t) h_k` for `0 ≤ k ≤ K`.
pub fn build_series<T: Scalar>(n: usize, t: f64, degree_cap: u64) -> Result<HeatKernelSeries<T>> {
    if n == 0 {
        return Err(domain("sphere dimension must be at least 1"));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain(format!("diffusion time must be positive, got {t}")));
    }
    let peak = (n as f64 / t).ceil() as u64;
    let mut coeffs = Vec::new();
    let mut k: u64 = 0;
    while k <= degree_cap {
        let ku = k as usize;
        let c = if k == 0 {
            1.0
        } else {
            (-eigenvalue_f64(n, ku) * t).exp() * dim_harmonic_f64(n, ku)
        };
        let c = T::of(c);
        if c == T::zero() && k >= peak {
            break;
        }
        coeffs.push(c);
        k += 1;
    }
    Ok(HeatKernelSeries {
        n,
        t,
        degree_cap,
        coeffs,
    })
}

/// `H_{t,K}` at a point whose cosine with the base point is `c`.
pub fn heat_kernel_point<T: Scalar>(series: &HeatKernelSeries<T>, c: T) -> Result<T> {
    let c = check_cosine(c)?;
    Ok(heat_kernel_unchecked(series, c))
}

pub(crate) fn heat_kernel_unchecked<T: Scalar>(series: &HeatKernelSeries<T>, c: T) -> T {
    let n = series.n;
    let coeffs = &series.coeffs;
    let mut acc = coeffs[0];
    if coeffs.len() == 1 {
        return acc;
    }
    let (mut prev, mut cur) = (T::one(), c);
    acc += coeffs[1] * cur;
    for (j, &cj) in coeffs.iter().enumerate().skip(2) {
        let i = j - 1;
        let next = (T::of_usize(2 * i + n - 1) * c * cur - T::of_usize(i) * prev)
            / T::of_usize(i + n - 1);
        prev = cur;
        cur = next;
        acc += cj * cur;
    }
    acc
}

/// `||H_{t,K}||²_{L²} = Σ_{k ≤ K} e^{-2 λ_k t} h_k`.
pub fn l2_norm_sq<T: Scalar>(series: &HeatKernelSeries<T>) -> T {
    let (n, t) = (series.n, series.t);
    let mut acc = 0.0;
    let peak = (n as f64 / (2.0 * t)).ceil() as u64;
    for k in 0..=series.degree_cap {
        let term = (-2.0 * eigenvalue_f64(n, k as usize) * t).exp() * dim_harmonic_f64(n, k as usize);
        if term == 0.0 && k >= peak {
            break;
        }
        acc += term;
    }
    T::of(acc)
}

/// Truncation degrees that keep `||H_t - H_{t,M}||_{L²} ≤ η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    /// `ceil(max{log2(1/η), (3n/2)(1 + a_n) log2(1/t)})`.
    pub k0: u64,
    /// Eigenvalue cutoff `M = 4^{k0/n}`.
    pub eigenvalue_cutoff: f64,
    /// Largest degree `K` with `λ_K ≤ M`.
    pub degree_cap: u64,
}

pub fn truncation_degree(n: usize, t: f64, eta: f64) -> Result<Truncation> {
    if n < 2 {
        return Err(domain(format!(
            "truncation bound needs n >= 2, got n = {n}"
        )));
    }
    if !(t > 0.0 && t < 1.0 / 6.0) {
        return Err(domain(format!(
            "truncation bound needs t in (0, 1/6), got {t}"
        )));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(domain(format!(
            "truncation bound needs eta in (0, 1), got {eta}"
        )));
    }
    let a_n = compute_a_n(n)?;
    let nf = n as f64;
    let k0 = (1.0 / eta)
        .log2()
        .max(1.5 * nf * (1.0 + a_n) * (1.0 / t).log2())
        .ceil();
    let m = 4f64.powf(k0 / nf);
    let b = nf - 1.0;
    let root = ((b * b + 4.0 * m).sqrt() - b) / 2.0;
    if !root.is_finite() || root >= u64::MAX as f64 {
        return Err(Error::Overflow(format!(
            "degree cutoff for M = 4^({k0}/{n})"
        )));
    }
    let mut degree_cap = root.floor() as u64;
    // Correct the float root by at most a step either way.
    while eigenvalue_f64(n, degree_cap as usize + 1) <= m {
        degree_cap += 1;
    }
    while degree_cap > 0 && eigenvalue_f64(n, degree_cap as usize) > m {
        degree_cap -= 1;
    }
    Ok(Truncation {
        k0: k0 as u64,
        eigenvalue_cutoff: m,
        degree_cap,
    })
}

/// `γ_k = ∫_{-1}^{1} (1-t)^{1/2} (1-t²)^{(n-2)/2} P_{k,n}(t) dt`.
pub fn hecke_funk_gamma(n: usize, k: usize) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!(
            "gamma_k needs n >= 2 (the integrand is singular at n = {n})"
        )));
    }
    let half_pow = (n as f64 - 2.0) / 2.0;
    Ok(adaptive_integrate(-1.0, 1.0, 1e-10, 40, |t| {
        let w = (1.0 - t * t).max(0.0);
        (1.0 - t).max(0.0).sqrt() * w.powf(half_pow) * legendre_unchecked(n, k, t.clamp(-1.0, 1.0))
    }))
}

/// `Σ_{k ≤ K} e^{-λ_k t} γ_k h_k`, the series that the Hecke–Funk formula
/// attaches to the chordal distance from the heat kernel's source.
pub fn hecke_funk_sum(series: &HeatKernelSeries<f64>) -> Result<f64> {
    series
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, &c)| Ok(c * hecke_funk_gamma(series.n(), k)?))
        .sum()
}

/// `∫ f(d(x0, x)) H_{t,K}(x) dσ(x)` for a function of the geodesic distance,
/// via the zonal reduction.
pub fn heat_kernel_distance_moment(
    series: &HeatKernelSeries<f64>,
    panels: usize,
    f: impl Fn(f64) -> f64,
) -> f64 {
    zonal_mean(series.n(), panels, |c| {
        f(c.clamp(-1.0, 1.0).acos()) * heat_kernel_unchecked(series, c)
    })
}
