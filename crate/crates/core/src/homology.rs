//! Reduced rational homology of finite simplicial complexes.
//!
//! Betti numbers come from integer boundary-matrix ranks:
//! `b~_j = f_j - rank d_j - rank d_{j+1}`, where `d_0` is the augmentation
//! when reduced homology is requested. Ranks are exact (fraction-free
//! elimination); a multi-prime modular path is available for speed and is
//! cross-checked against the exact one in the tests.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::poset::OrderComplex;

/// Column-major sparse integer matrix. Each column lists `(row, value)`
/// pairs in increasing row order with no zero values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn new(rows: usize, mut columns: Vec<Vec<(u32, i64)>>) -> Self {
        for col in &mut columns {
            col.retain(|&(_, v)| v != 0);
            col.sort_by_key(|&(r, _)| r);
            debug_assert!(col.windows(2).all(|w| w[0].0 < w[1].0), "duplicate row in column");
            debug_assert!(col.iter().all(|&(r, _)| (r as usize) < rows));
        }
        Self { rows, columns }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn from_dense(dense: &[Vec<i64>]) -> Self {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let columns = (0..cols)
            .map(|j| {
                (0..rows)
                    .filter(|&i| dense[i][j] != 0)
                    .map(|i| (i as u32, dense[i][j]))
                    .collect()
            })
            .collect();
        Self { rows, columns }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0i64; self.cols()]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                out[i as usize][j] = v;
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(u32, i64)] {
        &self.columns[j]
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// True when `self * rhs` is the zero matrix.
    pub fn product_is_zero(&self, rhs: &SparseMatrix) -> bool {
        assert_eq!(self.cols(), rhs.rows(), "inner dimensions differ");
        rhs.columns.par_iter().all(|col| {
            let mut acc: BTreeMap<u32, i128> = BTreeMap::new();
            for &(k, v) in col {
                for &(i, w) in &self.columns[k as usize] {
                    *acc.entry(i).or_insert(0) += v as i128 * w as i128;
                }
            }
            acc.values().all(|&x| x == 0)
        })
    }
}

/// Boundary maps of a simplicial complex; `boundaries[d]` sends `d`-chains
/// to `(d-1)`-chains. With `reduced`, `boundaries[0]` is the augmentation
/// row of ones, otherwise it has no rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplexQ {
    pub reduced: bool,
    pub boundaries: Vec<SparseMatrix>,
}

impl ChainComplexQ {
    pub fn face_counts(&self) -> Vec<usize> {
        self.boundaries.iter().map(SparseMatrix::cols).collect()
    }

    /// Check `d_{k-1} d_k = 0` in every degree.
    pub fn boundary_squared_is_zero(&self) -> bool {
        self.boundaries
            .windows(2)
            .all(|w| w[0].product_is_zero(&w[1]))
    }

    /// Rank of each boundary map.
    pub fn ranks(&self, method: RankMethod) -> Vec<usize> {
        self.boundaries
            .par_iter()
            .map(|m| method.rank(m))
            .collect()
    }

    /// `f_j - rank d_j - rank d_{j+1}` for each `j`.
    pub fn betti(&self, method: RankMethod) -> Vec<u64> {
        let ranks = self.ranks(method);
        let f = self.face_counts();
        (0..f.len())
            .map(|j| {
                let above = ranks.get(j + 1).copied().unwrap_or(0);
                (f[j] - ranks[j] - above) as u64
            })
            .collect()
    }
}

/// Simplicial boundary with alternating signs in the complex's vertex order.
pub fn boundary_matrices(c: &OrderComplex, reduced: bool) -> ChainComplexQ {
    let layers = c.layers();
    let boundaries = (0..layers.len())
        .into_par_iter()
        .map(|d| {
            let layer = &layers[d];
            if d == 0 {
                return if reduced {
                    SparseMatrix {
                        rows: 1,
                        columns: vec![vec![(0, 1)]; layer.len()],
                    }
                } else {
                    SparseMatrix::zeros(0, layer.len())
                };
            }
            let below = &layers[d - 1];
            let mut face = vec![0u32; d];
            let columns = layer
                .iter()
                .map(|simplex| {
                    let mut col: Vec<(u32, i64)> = (0..=d)
                        .map(|skip| {
                            let mut k = 0;
                            for (idx, &v) in simplex.iter().enumerate() {
                                if idx != skip {
                                    face[k] = v;
                                    k += 1;
                                }
                            }
                            let row = below.position(&face).expect("complex is closed under faces");
                            let sign = if skip % 2 == 0 { 1 } else { -1 };
                            (row as u32, sign)
                        })
                        .collect();
                    col.sort_unstable_by_key(|&(r, _)| r);
                    col
                })
                .collect();
            SparseMatrix {
                rows: below.len(),
                columns,
            }
        })
        .collect();
    ChainComplexQ { reduced, boundaries }
}

/// How matrix ranks are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankMethod {
    /// Fraction-free elimination over the integers.
    #[default]
    Exact,
    /// Maximum rank over `primes` large primes chosen with `seed`. Never
    /// exceeds the rational rank and equals it unless every chosen prime
    /// divides a particular minor.
    Modular { primes: usize, seed: u64 },
}

impl RankMethod {
    pub fn rank(self, m: &SparseMatrix) -> usize {
        match self {
            RankMethod::Exact => rank_exact(m),
            RankMethod::Modular { primes, seed } => rank_multimodular(m, primes, seed),
        }
    }
}

trait RankScalar: Clone {
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, d: &Self) -> Self;
    /// `a * x - b * y`, or `None` on overflow.
    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn is_unit(&self) -> bool;
}

impl RankScalar for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
    fn is_unit(&self) -> bool {
        self.abs() == 1
    }
}

impl RankScalar for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn is_unit(&self) -> bool {
        self.abs() == BigInt::from(1)
    }
}

/// Columns in elimination order: fewest nonzeros first, ties by index.
fn elimination_order(m: &SparseMatrix) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m.cols()).collect();
    order.sort_by_key(|&j| (m.columns[j].len(), j));
    order
}

fn reduce_integer<T: RankScalar>(m: &SparseMatrix) -> Option<usize> {
    // Column reduction keyed by lowest (largest-row) entry. A column whose
    // low row is already claimed is combined with the claimant so that the
    // low entry cancels; the surviving columns have distinct lows and are
    // therefore independent.
    let mut claimed: Vec<Option<Vec<(u32, T)>>> = vec![None; m.rows()];
    let mut rank = 0;
    for j in elimination_order(m) {
        let mut v: Vec<(u32, T)> = m.columns[j].iter().map(|&(r, x)| (r, T::from_i64(x))).collect();
        while let Some((low, _)) = v.last() {
            let low = *low as usize;
            match &claimed[low] {
                None => {
                    claimed[low] = Some(v);
                    rank += 1;
                    break;
                }
                Some(p) => v = eliminate(p, &v)?,
            }
        }
    }
    Some(rank)
}

/// Cancel the low entry of `v` against the column `p` sharing that low row.
fn eliminate<T: RankScalar>(p: &[(u32, T)], v: &[(u32, T)]) -> Option<Vec<(u32, T)>> {
    let a = &p.last().expect("pivot column nonempty").1;
    let b = &v.last().expect("column nonempty").1;
    let g = a.gcd(b);
    let (ca, cb) = (a.div_exact(&g), b.div_exact(&g));
    let zero = T::from_i64(0);
    let mut out = Vec::with_capacity(p.len() + v.len());
    let (mut i, mut k) = (0, 0);
    while i < v.len() || k < p.len() {
        let (row, x, y) = match (v.get(i), p.get(k)) {
            (Some((rv, xv)), Some((rp, _))) if rv < rp => {
                i += 1;
                (*rv, xv, &zero)
            }
            (Some((rv, _)), Some((rp, yp))) if rp < rv => {
                k += 1;
                (*rp, &zero, yp)
            }
            (Some((rv, xv)), Some((_, yp))) => {
                i += 1;
                k += 1;
                (*rv, xv, yp)
            }
            (Some((rv, xv)), None) => {
                i += 1;
                (*rv, xv, &zero)
            }
            (None, Some((rp, yp))) => {
                k += 1;
                (*rp, &zero, yp)
            }
            (None, None) => unreachable!(),
        };
        let val = T::combine(&ca, x, &cb, y)?;
        if !val.is_zero() {
            out.push((row, val));
        }
    }
    let content = out
        .iter()
        .fold(T::from_i64(0), |acc, (_, x)| if acc.is_zero() { x.clone() } else { acc.gcd(x) });
    if !content.is_zero() && !content.is_unit() {
        for (_, x) in &mut out {
            *x = x.div_exact(&content);
        }
    }
    Some(out)
}

/// Rank over the rationals. Works in `i128` and falls back to big integers
/// if an intermediate value would overflow.
pub fn rank_exact(m: &SparseMatrix) -> usize {
    reduce_integer::<i128>(m).unwrap_or_else(|| reduce_integer::<BigInt>(m).expect("big integers do not overflow"))
}

/// Rank over the rationals using big integers throughout.
pub fn rank_exact_bigint(m: &SparseMatrix) -> usize {
    reduce_integer::<BigInt>(m).expect("big integers do not overflow")
}

/// Rank over `Z/prime`. `prime` must be below `2^31`.
pub fn rank_modular(m: &SparseMatrix, prime: u64) -> usize {
    assert!(prime > 1 && prime < 1 << 31, "prime out of range");
    let reduce = |x: i64| x.rem_euclid(prime as i64) as u64;
    let mut claimed: Vec<Option<Vec<(u32, u64)>>> = vec![None; m.rows()];
    let mut rank = 0;
    for j in elimination_order(m) {
        let mut v: Vec<(u32, u64)> = m.columns[j]
            .iter()
            .map(|&(r, x)| (r, reduce(x)))
            .filter(|&(_, x)| x != 0)
            .collect();
        while let Some(&(low, b)) = v.last() {
            let low = low as usize;
            match &claimed[low] {
                None => {
                    // normalise so the low entry is 1
                    let inv = mod_inverse(b, prime);
                    for (_, x) in &mut v {
                        *x = *x * inv % prime;
                    }
                    claimed[low] = Some(v);
                    rank += 1;
                    break;
                }
                Some(p) => {
                    // v - b * p (p has low entry 1)
                    let mut out = Vec::with_capacity(v.len() + p.len());
                    let (mut i, mut k) = (0, 0);
                    while i < v.len() || k < p.len() {
                        let take_v = k >= p.len() || (i < v.len() && v[i].0 < p[k].0);
                        let take_p = i >= v.len() || (k < p.len() && p[k].0 < v[i].0);
                        let (row, val) = if take_v {
                            i += 1;
                            (v[i - 1].0, v[i - 1].1)
                        } else if take_p {
                            k += 1;
                            (p[k - 1].0, (prime - b * p[k - 1].1 % prime) % prime)
                        } else {
                            i += 1;
                            k += 1;
                            (v[i - 1].0, (v[i - 1].1 + prime - b * p[k - 1].1 % prime) % prime)
                        };
                        if val != 0 {
                            out.push((row, val));
                        }
                    }
                    v = out;
                }
            }
        }
    }
    rank
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Large primes below `2^31` used by the modular path.
pub const MODULAR_PRIMES: [u64; 10] = [
    2147483647, 2147483629, 2147483587, 2147483579, 2147483563, 2147483549, 2147483543, 2147483497,
    2147483489, 2147483477,
];

/// Maximum of [`rank_modular`] over `count` primes drawn with `seed`.
pub fn rank_multimodular(m: &SparseMatrix, count: usize, seed: u64) -> usize {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    MODULAR_PRIMES
        .choose_multiple(&mut rng, count.clamp(1, MODULAR_PRIMES.len()))
        .map(|&p| rank_modular(m, p))
        .max()
        .unwrap_or(0)
}

/// Reduced rational Betti numbers together with the Euler characteristic.
///
/// `euler` is the unreduced characteristic `sum (-1)^d f_d`; for a nonempty
/// complex it equals `1 + sum (-1)^j b~_j`. The empty complex is reported
/// with `empty: true`, no Betti numbers and `euler = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiVector {
    pub reduced_betti: BTreeMap<usize, u64>,
    pub euler: i64,
    pub empty: bool,
}

impl BettiVector {
    pub fn empty() -> Self {
        Self {
            reduced_betti: BTreeMap::new(),
            euler: 0,
            empty: true,
        }
    }

    /// `b~_j`, zero outside the stored range.
    pub fn get(&self, j: usize) -> u64 {
        self.reduced_betti.get(&j).copied().unwrap_or(0)
    }

    /// All reduced Betti numbers vanish (and the complex is nonempty).
    pub fn is_acyclic(&self) -> bool {
        !self.empty && self.reduced_betti.values().all(|&b| b == 0)
    }

    pub fn nonzero(&self) -> Vec<(usize, u64)> {
        self.reduced_betti
            .iter()
            .filter(|(_, &b)| b != 0)
            .map(|(&j, &b)| (j, b))
            .collect()
    }

    /// Equal homology: same emptiness and same nonzero Betti numbers,
    /// regardless of how many top degrees are listed.
    pub fn same_homology(&self, other: &BettiVector) -> bool {
        self.empty == other.empty && self.nonzero() == other.nonzero()
    }

    /// `euler == 1 + sum (-1)^j b~_j`.
    pub fn euler_identity_holds(&self) -> bool {
        if self.empty {
            return self.euler == 0;
        }
        let alt: i64 = self
            .reduced_betti
            .iter()
            .map(|(&j, &b)| if j % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum();
        self.euler == 1 + alt
    }
}

pub fn betti_reduced(c: &OrderComplex) -> BettiVector {
    betti_reduced_with(c, RankMethod::Exact)
}

pub fn betti_reduced_with(c: &OrderComplex, method: RankMethod) -> BettiVector {
    if c.is_empty() {
        return BettiVector::empty();
    }
    let chain = boundary_matrices(c, true);
    let reduced_betti = chain.betti(method).into_iter().enumerate().collect();
    BettiVector {
        reduced_betti,
        euler: c.euler_characteristic(),
        empty: false,
    }
}
