#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Legendre polynomial from its explicit coefficient expansion
/// `Σ_j C_{2j} t^{k-2j} (1-t²)^j` with
/// `C_{2j} = (-1)^j k(k-1)⋯(k-2j+1) / ((2·4⋯2j)(n(n+2)⋯(n+2j-2)))`.
pub fn explicit_legendre(n: usize, k: usize, t: f64) -> f64 {
    let mut sum = 0.0;
    let mut c = 1.0;
    for j in 0..=k / 2 {
        if j > 0 {
            let jj = j as f64;
            let falling = (k - 2 * j + 2) as f64 * (k - 2 * j + 1) as f64;
            c *= -falling / (2.0 * jj * (n as f64 + 2.0 * jj - 2.0));
        }
        sum += c * t.powi((k - 2 * j) as i32) * (1.0 - t * t).powi(j as i32);
    }
    sum
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}
