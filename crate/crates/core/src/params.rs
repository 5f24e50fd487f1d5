//! Closed-form parameters of the random net construction.
//!
//! Given a target scale `eps` and failure probability `delta`, these give the number
//! of generators `k`, the word length `l`, the covering radius `r` the net attains
//! with probability `1 - delta`, and the heat-kernel time `t = eps²` used in the
//! analysis. The constant `c_n` is not known in closed form and is an input.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Result};

pub const DEFAULT_C_N: f64 = 1.0;

/// `a_n = 2 log2 log2(5n) / log2(5n)`.
pub fn compute_a_n(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!("a_n is defined for n >= 2, got n = {n}")));
    }
    let l = (5.0 * n as f64).log2();
    Ok(2.0 * l.log2() / l)
}

fn check_eps(n: usize, eps: f64) -> Result<()> {
    let upper = 1.0 / (3.0 * n as f64);
    if !(eps > 0.0 && eps < upper) {
        return Err(domain(format!(
            "eps must lie in (0, 1/(3n)) = (0, {upper:.6}), got {eps}"
        )));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// `r = 2 eps sqrt(ln(3 c_n / eps^{2n-1}))`.
pub fn compute_r(n: usize, eps: f64, c_n: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("sphere dimension must be at least 1"));
    }
    if !(eps > 0.0) {
        return Err(domain(format!("eps must be positive, got {eps}")));
    }
    if !(c_n > 0.0) {
        return Err(domain(format!("c_n must be positive, got {c_n}")));
    }
    // ln(3 c_n) - (2n - 1) ln(eps), kept in log space
    let log_arg = (3.0 * c_n).ln() - (2.0 * n as f64 - 1.0) * eps.ln();
    if !(log_arg > 0.0) {
        return Err(domain(format!(
            "r needs 3 c_n > eps^(2n-1); got c_n = {c_n}, eps = {eps}"
        )));
    }
    Ok(2.0 * eps * log_arg.sqrt())
}

/// The real-valued lower bound on `k` before rounding up.
pub fn k_bound(n: usize, eps: f64, delta: f64) -> Result<f64> {
    let a_n = compute_a_n(n)?;
    check_eps(n, eps)?;
    check_delta(delta)?;
    let nf = n as f64;
    let inner = (nf + 4.0) + 2.0 * (1.0 / delta).ln() + 6.0 * nf * (1.0 + a_n) * (1.0 / eps).ln()
        - ln_gamma(nf + 1.0);
    Ok(8.0 * std::f64::consts::LN_2 * inner)
}

/// Number of Haar generators: `ceil(8 ln 2 ((n+4) + 2 ln(1/δ) + 6n(1+a_n) ln(1/ε) - ln n!))`.
pub fn compute_k(n: usize, eps: f64, delta: f64) -> Result<u64> {
    Ok(k_bound(n, eps, delta)?.ceil() as u64)
}

/// The real-valued word length before rounding up.
pub fn l_bound(n: usize, eps: f64, r: f64) -> Result<f64> {
    l_bound_with(n, eps, r, n as f64)
}

/// Variant whose second term lacks the factor `n`; reported for comparison only.
pub fn l_bound_without_n(n: usize, eps: f64, r: f64) -> Result<f64> {
    l_bound_with(n, eps, r, 1.0)
}

fn l_bound_with(n: usize, eps: f64, r: f64, second_factor: f64) -> Result<f64> {
    let a_n = compute_a_n(n)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(domain(format!("r must lie in (0, 1), got {r}")));
    }
    let nf = n as f64;
    Ok(nf / 2.0 * (1.0 / (r * eps)).log2()
        + (4.0 + 3.0 * a_n) * second_factor * (1.0 / eps).log2())
}

/// Word length: `ceil((n/2) log2(1/(rε)) + (4 + 3a_n) n log2(1/ε))`.
pub fn compute_l(n: usize, eps: f64, r: f64) -> Result<u64> {
    Ok(l_bound(n, eps, r)?.ceil() as u64)
}

/// All parameters for one `(n, eps, delta, c_n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremParams {
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub c_n: f64,
    pub a_n: f64,
    /// Heat-kernel time, `eps²`.
    pub t: f64,
    pub r: f64,
    pub k: u64,
    pub l: u64,
    /// Word length from the variant without the factor `n`.
    pub l_without_n: u64,
    /// `log2((2k)^l) = l (1 + log2 k)`: the size of full enumeration.
    pub log2_words: f64,
}

pub fn theorem_params(n: usize, eps: f64, delta: f64, c_n: f64) -> Result<TheoremParams> {
    let a_n = compute_a_n(n)?;
    check_eps(n, eps)?;
    check_delta(delta)?;
    let r = compute_r(n, eps, c_n)?;
    let k = compute_k(n, eps, delta)?;
    let l = compute_l(n, eps, r)?;
    let l_without_n = l_bound_without_n(n, eps, r)?.ceil() as u64;
    Ok(TheoremParams {
        n,
        eps,
        delta,
        c_n,
        a_n,
        t: eps * eps,
        r,
        k,
        l,
        l_without_n,
        log2_words: l as f64 * (1.0 + (k as f64).log2()),
    })
}
