//! Nets `x0 Ŝ^l`: the images of a base point under every word of length `l` in the
//! generators and their inverses, or under `m` uniformly sampled such words.
//!
//! Words are not freely reduced, so every one of the `(2k)^l` words carries equal
//! weight. Coincident images are merged and their multiplicities summed.

use std::cmp::Ordering;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{GeneratorSet, Rotation, UnitVector};
use crate::Scalar;

pub const DEFAULT_DEDUPE_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_CAP: u64 = 10_000_000;

/// Points buffered before an intermediate merge pass.
const COMPACT_EVERY: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetMode {
    Full,
    Sampled,
}

impl NetMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NetMode::Full => "full",
            NetMode::Sampled => "sampled",
        }
    }
}

impl std::str::FromStr for NetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(NetMode::Full),
            "sampled" => Ok(NetMode::Sampled),
            other => Err(invalid(format!("unknown net mode {other:?}"))),
        }
    }
}

/// How a net was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetMeta {
    pub k: usize,
    pub l: usize,
    pub seed: u64,
    pub x0: Vec<f64>,
    pub mode: NetMode,
    pub dedupe_tolerance: f64,
}

impl NetMeta {
    /// Provenance for a hand-built point set.
    pub fn explicit(n: usize) -> Self {
        let mut x0 = vec![0.0; n + 1];
        x0[n] = 1.0;
        Self {
            k: 0,
            l: 0,
            seed: 0,
            x0,
            mode: NetMode::Sampled,
            dedupe_tolerance: DEFAULT_DEDUPE_TOLERANCE,
        }
    }
}

/// A signed-letter word: `+i` is generator `i` (1-based), `-i` its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<i32>,
}

impl Word {
    pub fn new(letters: Vec<i32>) -> Self {
        Self { letters }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        match self
            .letters
            .iter()
            .find(|&&a| a == 0 || a.unsigned_abs() as usize > k)
        {
            Some(&letter) => Err(Error::LetterOutOfRange { letter, k }),
            None => Ok(()),
        }
    }
}

/// Weighted point set on `S^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalNet<T> {
    dim: usize,
    points: Vec<UnitVector<T>>,
    multiplicities: Vec<u64>,
    meta: NetMeta,
}

impl<T: Scalar> SphericalNet<T> {
    /// Validated constructor. Points are taken as given (no merging).
    pub fn from_parts(points: Vec<UnitVector<T>>, multiplicities: Vec<u64>, meta: NetMeta) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyNet)?;
        let dim = first.dim();
        if points.len() != multiplicities.len() {
            return Err(invalid(format!(
                "{} points but {} multiplicities",
                points.len(),
                multiplicities.len()
            )));
        }
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim + 1,
                found: p.dim() + 1,
            });
        }
        if multiplicities.contains(&0) {
            return Err(invalid("multiplicities must be positive"));
        }
        Ok(Self {
            dim,
            points,
            multiplicities,
            meta,
        })
    }

    /// Equal-weight net from a list of points, merging coincident ones.
    pub fn from_points(points: Vec<UnitVector<T>>) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptyNet)?.dim();
        let mut buf = WeightedPoints::new(dim + 1);
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim + 1,
                    found: p.dim() + 1,
                });
            }
            buf.push(p.coords(), 1);
        }
        let meta = NetMeta::explicit(dim);
        Ok(buf.compact(T::of(meta.dedupe_tolerance)).into_net(dim, meta))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of distinct stored points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[UnitVector<T>] {
        &self.points
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    pub fn meta(&self) -> &NetMeta {
        &self.meta
    }

    /// Sum of multiplicities.
    pub fn total_weight(&self) -> u64 {
        self.multiplicities.iter().sum()
    }

    /// Normalized weights `multiplicity / total`.
    pub fn weights(&self) -> Vec<T> {
        let total = T::of(self.total_weight() as f64);
        self.multiplicities
            .iter()
            .map(|&m| T::of(m as f64) / total)
            .collect()
    }

    /// Every point moved by `r`, multiplicities kept.
    pub fn rotated(&self, r: &Rotation<T>) -> Result<Self> {
        let points = self
            .points
            .iter()
            .map(|p| r.apply(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            points,
            ..self.clone()
        })
    }

    /// This net with `other`'s points added (merged at this net's tolerance).
    pub fn union(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim + 1,
                found: other.dim + 1,
            });
        }
        let mut buf = WeightedPoints::new(self.dim + 1);
        for net in [self, other] {
            for (p, &m) in net.points.iter().zip(&net.multiplicities) {
                buf.push(p.coords(), m);
            }
        }
        let tol = T::of(self.meta.dedupe_tolerance);
        Ok(buf.compact(tol).into_net(self.dim, self.meta.clone()))
    }
}

/// Options for [`enumerate_net_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetOptions {
    pub cap: u64,
    pub dedupe_tolerance: f64,
    /// Traverse the `2k` first-letter subtrees on the rayon pool.
    pub parallel: bool,
}

impl Default for NetOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CAP,
            dedupe_tolerance: DEFAULT_DEDUPE_TOLERANCE,
            parallel: true,
        }
    }
}

/// `(2k)^l`, or `None` on `u64` overflow.
pub fn word_count(k: usize, l: usize) -> Option<u64> {
    let l = u32::try_from(l).ok()?;
    (2 * k as u64).checked_pow(l)
}

/// `log2((2k)^l)`.
pub fn log2_word_count(k: usize, l: usize) -> f64 {
    l as f64 * (2.0 * k as f64).log2()
}

fn check_base<T: Scalar>(gens: &GeneratorSet<T>, x0: &UnitVector<T>) -> Result<()> {
    if x0.dim() != gens.dim() {
        return Err(Error::DimensionMismatch {
            expected: gens.dim() + 1,
            found: x0.dim() + 1,
        });
    }
    Ok(())
}

fn meta_for<T: Scalar>(gens: &GeneratorSet<T>, l: usize, x0: &UnitVector<T>, mode: NetMode, tol: f64) -> NetMeta {
    NetMeta {
        k: gens.k(),
        l,
        seed: gens.seed(),
        x0: x0.coords().iter().map(|c| c.to_f64_lossy()).collect(),
        mode,
        dedupe_tolerance: tol,
    }
}

/// Full enumeration with default tolerance and parallel traversal.
pub fn enumerate_net<T: Scalar>(
    gens: &GeneratorSet<T>,
    l: usize,
    x0: &UnitVector<T>,
    cap: u64,
) -> Result<SphericalNet<T>> {
    enumerate_net_with(
        gens,
        l,
        x0,
        &NetOptions {
            cap,
            ..NetOptions::default()
        },
    )
}

/// Depth-first traversal of the word tree, one matrix–vector product per node.
///
/// For a word `(s_1, ..., s_l)` the leaf is `s_l (... (s_1 x0))`; letters are tried in
/// the order `+1..+k, -1..-k`.
pub fn enumerate_net_with<T: Scalar>(
    gens: &GeneratorSet<T>,
    l: usize,
    x0: &UnitVector<T>,
    opts: &NetOptions,
) -> Result<SphericalNet<T>> {
    check_base(gens, x0)?;
    let k = gens.k();
    match word_count(k, l) {
        Some(count) if count <= opts.cap => {}
        _ => {
            return Err(Error::Capacity {
                log2_words: log2_word_count(k, l),
                cap: opts.cap,
            })
        }
    }
    let d = gens.dim() + 1;
    let tol = T::of(opts.dedupe_tolerance);
    let alphabet: Vec<&Rotation<T>> = gens.alphabet().collect();

    let subtree = |first: usize| -> WeightedPoints<T> {
        let mut levels = vec![T::zero(); (l + 1) * d];
        let mut word = Vec::with_capacity(l);
        alphabet[first].apply_into(x0.coords(), &mut levels[..d]);
        word.push(first);
        let mut acc = WeightedPoints::new(d);
        dfs(&alphabet, d, &mut levels, l - 1, &mut word, &mut |_, p| {
            acc.push(p, 1);
            if acc.len() >= COMPACT_EVERY {
                acc = std::mem::replace(&mut acc, WeightedPoints::new(d)).compact(tol);
            }
        });
        acc.compact(tol)
    };

    let merged = if l == 0 {
        let mut acc = WeightedPoints::new(d);
        acc.push(x0.coords(), 1);
        acc
    } else if opts.parallel {
        let parts: Vec<_> = (0..alphabet.len()).into_par_iter().map(subtree).collect();
        WeightedPoints::concat(d, parts)
    } else {
        let parts: Vec<_> = (0..alphabet.len()).map(subtree).collect();
        WeightedPoints::concat(d, parts)
    };
    let meta = meta_for(gens, l, x0, NetMode::Full, opts.dedupe_tolerance);
    Ok(merged.compact(tol).into_net(d - 1, meta))
}

/// `levels[..d]` holds the current point, the rest is scratch for deeper nodes.
fn dfs<T: Scalar>(
    alphabet: &[&Rotation<T>],
    d: usize,
    levels: &mut [T],
    remaining: usize,
    word: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize], &[T]),
) {
    if remaining == 0 {
        visit(word, &levels[..d]);
        return;
    }
    let (cur, rest) = levels.split_at_mut(d);
    for (i, r) in alphabet.iter().enumerate() {
        r.apply_into(cur, &mut rest[..d]);
        word.push(i);
        dfs(alphabet, d, rest, remaining - 1, word, visit);
        word.pop();
    }
}

/// Serial traversal calling `visit(word, leaf)` for all `(2k)^l` words, in traversal
/// order and without merging.
pub fn for_each_leaf<T: Scalar>(
    gens: &GeneratorSet<T>,
    l: usize,
    x0: &UnitVector<T>,
    cap: u64,
    mut visit: impl FnMut(&Word, &UnitVector<T>),
) -> Result<()> {
    check_base(gens, x0)?;
    if !word_count(gens.k(), l).is_some_and(|c| c <= cap) {
        return Err(Error::Capacity {
            log2_words: log2_word_count(gens.k(), l),
            cap,
        });
    }
    let d = gens.dim() + 1;
    let alphabet: Vec<&Rotation<T>> = gens.alphabet().collect();
    let mut levels = vec![T::zero(); (l + 1) * d];
    levels[..d].copy_from_slice(x0.coords());
    let mut word = Vec::with_capacity(l);
    dfs(&alphabet, d, &mut levels, l, &mut word, &mut |w, p| {
        let word = Word::new(w.iter().map(|&i| gens.letter_label(i)).collect());
        visit(&word, &UnitVector::from_raw(p.to_vec()));
    });
    Ok(())
}

/// `m` iid uniform words of length `l`, each contributing multiplicity one.
pub fn sample_words_net<T: Scalar, R: Rng + ?Sized>(
    gens: &GeneratorSet<T>,
    l: usize,
    x0: &UnitVector<T>,
    m: u64,
    rng: &mut R,
) -> Result<SphericalNet<T>> {
    sample_words_net_with(gens, l, x0, m, DEFAULT_DEDUPE_TOLERANCE, rng)
}

pub fn sample_words_net_with<T: Scalar, R: Rng + ?Sized>(
    gens: &GeneratorSet<T>,
    l: usize,
    x0: &UnitVector<T>,
    m: u64,
    dedupe_tolerance: f64,
    rng: &mut R,
) -> Result<SphericalNet<T>> {
    check_base(gens, x0)?;
    if m == 0 {
        return Err(invalid("sample count must be at least 1"));
    }
    let d = gens.dim() + 1;
    let tol = T::of(dedupe_tolerance);
    let alphabet: Vec<&Rotation<T>> = gens.alphabet().collect();
    let mut acc = WeightedPoints::new(d);
    let mut cur = vec![T::zero(); d];
    let mut next = vec![T::zero(); d];
    for _ in 0..m {
        cur.copy_from_slice(x0.coords());
        for _ in 0..l {
            let letter = rng.random_range(0..alphabet.len());
            alphabet[letter].apply_into(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        acc.push(&cur, 1);
        if acc.len() >= COMPACT_EVERY {
            acc = acc.compact(tol);
        }
    }
    let mut meta = meta_for(gens, l, x0, NetMode::Sampled, dedupe_tolerance);
    meta.seed = gens.seed();
    Ok(acc.compact(tol).into_net(d - 1, meta))
}

/// `s_l ⋯ s_1` for the word `(s_1, ..., s_l)`, matching the leaf convention of
/// [`enumerate_net`].
pub fn word_to_rotation<T: Scalar>(w: &Word, gens: &GeneratorSet<T>) -> Result<Rotation<T>> {
    w.validate(gens.k())?;
    let mut acc = Rotation::identity(gens.dim())?;
    for &letter in w.letters() {
        acc = Rotation::compose(gens.letter(letter)?, &acc)?;
    }
    Ok(acc)
}

/// Flat buffer of weighted points, merged by [`compact`](Self::compact).
struct WeightedPoints<T> {
    d: usize,
    coords: Vec<T>,
    mults: Vec<u64>,
}

impl<T: Scalar> WeightedPoints<T> {
    fn new(d: usize) -> Self {
        Self {
            d,
            coords: Vec::new(),
            mults: Vec::new(),
        }
    }

    fn concat(d: usize, parts: Vec<Self>) -> Self {
        let mut out = Self::new(d);
        for p in parts {
            out.coords.extend(p.coords);
            out.mults.extend(p.mults);
        }
        out
    }

    fn len(&self) -> usize {
        self.mults.len()
    }

    fn push(&mut self, p: &[T], m: u64) {
        self.coords.extend_from_slice(p);
        self.mults.push(m);
    }

    fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    /// Greedy merge: points are visited in order of their projection onto a fixed
    /// generic direction, and each joins the first representative within `tol`
    /// (Euclidean) or becomes a new one. The result is independent of input order.
    fn compact(self, tol: T) -> Self {
        let d = self.d;
        let dir = sweep_direction::<T>(d);
        let keys: Vec<T> = (0..self.len())
            .map(|i| crate::geometry::dot(self.point(i), &dir))
            .collect();
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_unstable_by(|&a, &b| {
            keys[a]
                .partial_cmp(&keys[b])
                .unwrap_or(Ordering::Equal)
                .then_with(|| lex_cmp(self.point(a), self.point(b)))
                .then_with(|| self.mults[a].cmp(&self.mults[b]))
        });

        let tol_sq = tol * tol;
        let mut out = Self::new(d);
        let mut rep_keys: Vec<T> = Vec::new();
        for &i in &order {
            let p = self.point(i);
            let key = keys[i];
            let mut found = None;
            for r in (0..rep_keys.len()).rev() {
                if rep_keys[r] < key - tol {
                    break;
                }
                let q = out.point(r);
                let dist_sq = p
                    .iter()
                    .zip(q)
                    .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
                if dist_sq <= tol_sq {
                    found = Some(r);
                    break;
                }
            }
            match found {
                Some(r) => out.mults[r] += self.mults[i],
                None => {
                    out.push(p, self.mults[i]);
                    rep_keys.push(key);
                }
            }
        }
        out
    }

    fn into_net(self, dim: usize, meta: NetMeta) -> SphericalNet<T> {
        let points = self
            .coords
            .chunks_exact(self.d)
            .map(|c| UnitVector::from_raw(c.to_vec()))
            .collect();
        SphericalNet {
            dim,
            points,
            multiplicities: self.mults,
            meta,
        }
    }
}

fn lex_cmp<T: Scalar>(a: &[T], b: &[T]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

fn sweep_direction<T: Scalar>(d: usize) -> Vec<T> {
    let raw: Vec<f64> = (0..d)
        .map(|i| ((i as f64 + 1.0) * 0.618_033_988_749_894_9).fract() - 0.45)
        .collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    raw.into_iter().map(|x| T::of(x / norm)).collect()
}
