//! Counting conjugacy classes of cyclic subgroups of `sV_{n,r}`.
//!
//! A cyclic subgroup of order `m` is determined up to conjugacy by how many
//! orbits of each length `s | m` it has on a suitable leaf set, taken modulo
//! `n - 1`. The enumerator is the source of truth; closed formulas are
//! computed alongside and compared, never substituted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, factorial, gcd, lcm, pow_big, totient};
use crate::error::{Error, Result};

/// Cap on the number of vectors visited by [`enumerate_orbit_vectors`].
pub const MAX_ENUMERATION: u128 = 10_000_000;
/// Default cap on `|Y|` for the Weyl brute force.
pub const DEFAULT_WEYL_CAP: u64 = 8;

/// Which coefficients multiply `k_s` in the congruence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumForm {
    /// `sum s k_s = r (mod n-1)`: the number of leaves.
    CoefficientS,
    /// `sum (m/s) k_s = r (mod n-1)`.
    CoefficientMOverS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountingConvention {
    pub sum_form: SumForm,
    pub k1_forced_nonzero: bool,
}

impl CountingConvention {
    /// Coefficient `s`, `k_1 != 0`. The default.
    pub fn statement() -> Self {
        Self {
            sum_form: SumForm::CoefficientS,
            k1_forced_nonzero: true,
        }
    }

    /// Coefficient `m/s`, `k_1 != 0`.
    pub fn proof() -> Self {
        Self {
            sum_form: SumForm::CoefficientMOverS,
            k1_forced_nonzero: true,
        }
    }

    /// Coefficient `s`, `k_1` unrestricted.
    pub fn literal() -> Self {
        Self {
            sum_form: SumForm::CoefficientS,
            k1_forced_nonzero: false,
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "statement" => Ok(Self::statement()),
            "proof" => Ok(Self::proof()),
            "literal" => Ok(Self::literal()),
            other => Err(Error::Parse(format!(
                "unknown convention {other:?} (expected statement, proof or literal)"
            ))),
        }
    }

    pub fn name(&self) -> String {
        match (self.sum_form, self.k1_forced_nonzero) {
            (SumForm::CoefficientS, true) => "statement".into(),
            (SumForm::CoefficientMOverS, true) => "proof".into(),
            (SumForm::CoefficientS, false) => "literal".into(),
            (SumForm::CoefficientMOverS, false) => "proof-k1-free".into(),
        }
    }
}

impl Default for CountingConvention {
    fn default() -> Self {
        Self::statement()
    }
}

/// Orbit counts `k_s` for each divisor `s` of `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrbitTypeVector {
    pub m: u64,
    /// Keyed by divisor; every divisor of `m` is present.
    pub counts: BTreeMap<u64, u64>,
}

impl OrbitTypeVector {
    pub fn k(&self, s: u64) -> u64 {
        self.counts.get(&s).copied().unwrap_or(0)
    }

    /// `|Y| = sum s k_s`.
    pub fn point_count(&self) -> u64 {
        self.counts.iter().map(|(&s, &k)| s * k).sum()
    }

    /// Parse `k1=1,k2=0,k4=1` for order `m`. Unlisted divisors count 0.
    pub fn parse(m: u64, text: &str) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        let divs: BTreeSet<u64> = divisors(m).into_iter().collect();
        let mut counts: BTreeMap<u64, u64> = divs.iter().map(|&d| (d, 0)).collect();
        let mut given = BTreeSet::new();
        for piece in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (lhs, rhs) = piece
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected k<s>=<count>, got {piece:?}")))?;
            let s: u64 = lhs
                .trim()
                .strip_prefix('k')
                .ok_or_else(|| Error::Parse(format!("expected k<s>, got {lhs:?}")))?
                .parse()
                .map_err(|e| Error::Parse(format!("bad orbit length in {piece:?}: {e}")))?;
            let k: u64 = rhs
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad count in {piece:?}: {e}")))?;
            if !divs.contains(&s) {
                return Err(Error::Parse(format!("orbit length {s} does not divide m = {m}")));
            }
            if !given.insert(s) {
                return Err(Error::Parse(format!("k{s} given twice")));
            }
            counts.insert(s, k);
        }
        Ok(Self { m, counts })
    }
}

impl fmt::Display for OrbitTypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|(s, k)| format!("k{s}={k}")).collect();
        f.write_str(&parts.join(","))
    }
}

fn check_params(n: u64, r: u64, m: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n = {n} must be at least 2")));
    }
    if r < 1 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    if m < 1 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    Ok(())
}

/// Does `v` satisfy the constraints of `conv`? Checked from scratch.
pub fn satisfies(v: &OrbitTypeVector, n: u64, r: u64, conv: CountingConvention) -> bool {
    let m = v.m;
    let modulus = (n - 1) as u128;
    let divs = divisors(m);
    if v.counts.keys().copied().collect::<Vec<_>>() != divs {
        return false;
    }
    if v.counts.values().any(|&k| k > n - 1) || v.k(m) == 0 {
        return false;
    }
    if conv.k1_forced_nonzero && v.k(1) == 0 {
        return false;
    }
    let sum: u128 = v
        .counts
        .iter()
        .map(|(&s, &k)| {
            let c = match conv.sum_form {
                SumForm::CoefficientS => s,
                SumForm::CoefficientMOverS => m / s,
            };
            c as u128 * k as u128
        })
        .sum();
    (sum % modulus) == (r as u128 % modulus)
}

/// Every orbit vector for `(n, r, m)` under `conv`, in lexicographic order
/// of `(k_d)` over increasing divisors `d`.
pub fn enumerate_orbit_vectors(n: u64, r: u64, m: u64, conv: CountingConvention) -> Result<Vec<OrbitTypeVector>> {
    check_params(n, r, m)?;
    let divs = divisors(m);
    let total = (n as u128).checked_pow(divs.len() as u32).unwrap_or(u128::MAX);
    if total > MAX_ENUMERATION {
        return Err(Error::Resource {
            what: "orbit vectors to enumerate",
            actual: total,
            limit: MAX_ENUMERATION,
        });
    }
    let modulus = n - 1;
    let mut out = Vec::new();
    let mut ks = vec![0u64; divs.len()];
    loop {
        let k_of = |s: u64| ks[divs.iter().position(|&d| d == s).expect("divisor")];
        let ok_m = k_of(m) != 0;
        let ok_1 = !conv.k1_forced_nonzero || k_of(1) != 0;
        if ok_m && ok_1 {
            let sum: u128 = divs
                .iter()
                .zip(&ks)
                .map(|(&s, &k)| {
                    let c = match conv.sum_form {
                        SumForm::CoefficientS => s,
                        SumForm::CoefficientMOverS => m / s,
                    };
                    c as u128 * k as u128
                })
                .sum();
            if sum % modulus as u128 == r as u128 % modulus as u128 {
                out.push(OrbitTypeVector {
                    m,
                    counts: divs.iter().copied().zip(ks.iter().copied()).collect(),
                });
            }
        }
        // odometer, last divisor fastest
        let mut pos = ks.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if ks[pos] + 1 < n {
                ks[pos] += 1;
                break;
            }
            ks[pos] = 0;
        }
    }
}

/// `n^phi(m) - 1`, valid only when `gcd(m, n-1) = 1`.
pub fn count_closed_coprime(n: u64, m: u64) -> Result<BigUint> {
    if n < 2 || m < 1 {
        return Err(Error::InvalidArgument("need n >= 2 and m >= 1".into()));
    }
    if gcd(m, n - 1) != 1 {
        return Err(Error::InvalidArgument(format!(
            "gcd(m, n-1) = {} != 1; use count_closed_general",
            gcd(m, n - 1)
        )));
    }
    Ok(pow_big(n, totient(m)) - 1u32)
}

/// `(n-1) n^(tau(m)-2)` for `m >= 2`, and `1` for `m = 1` where only `k_1`
/// exists and the congruence fixes it.
pub fn count_free_choice(n: u64, m: u64) -> Result<BigUint> {
    if n < 2 || m < 1 {
        return Err(Error::InvalidArgument("need n >= 2 and m >= 1".into()));
    }
    let tau = divisors(m).len() as u64;
    if tau < 2 {
        return Ok(BigUint::one());
    }
    Ok(BigUint::from(n - 1) * pow_big(n, tau - 2))
}

/// The residues `a = r - sum_{s' | m, s' != m} alpha(s') s'`, one per
/// choice of `alpha`, with `alpha(1)` in `1..n-1` (the faithful orbit count)
/// and every other `alpha(s')` in `0..n-1`. Kept as a multiset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueSet {
    pub values: Vec<i128>,
    pub d: u64,
}

pub fn residue_set(n: u64, r: u64, m: u64) -> Result<ResidueSet> {
    residue_set_ranged(n, r, m, 1..=n - 1, 0..=n - 1)
}

fn residue_set_ranged(
    n: u64,
    r: u64,
    m: u64,
    first: std::ops::RangeInclusive<u64>,
    rest: std::ops::RangeInclusive<u64>,
) -> Result<ResidueSet> {
    check_params(n, r, m)?;
    let others: Vec<u64> = divisors(m).into_iter().filter(|&s| s != m).collect();
    let span = |rng: &std::ops::RangeInclusive<u64>| (rng.end() + 1).saturating_sub(*rng.start()) as u128;
    let total = others
        .iter()
        .map(|&s| if s == 1 { span(&first) } else { span(&rest) })
        .try_fold(1u128, |acc, x| acc.checked_mul(x))
        .unwrap_or(u128::MAX);
    if total > MAX_ENUMERATION {
        return Err(Error::Resource {
            what: "residue choices",
            actual: total,
            limit: MAX_ENUMERATION,
        });
    }
    let mut values = vec![r as i128];
    for &s in &others {
        let range = if s == 1 { first.clone() } else { rest.clone() };
        values = values
            .iter()
            .flat_map(|&v| range.clone().map(move |a| v - a as i128 * s as i128))
            .collect();
    }
    Ok(ResidueSet {
        values,
        d: gcd(m, n - 1),
    })
}

/// `d * #{a in Omega : d | a}` with `d = gcd(m, n-1)` and `Omega` the
/// multiset from [`residue_set`]. Each admissible `a` leaves exactly `d`
/// solutions `k_1 in 1..n-1` of `m k_1 = a (mod n-1)`.
pub fn count_closed_general(n: u64, r: u64, m: u64) -> Result<BigUint> {
    let omega = residue_set(n, r, m)?;
    let hits = omega.values.iter().filter(|&&a| a % omega.d as i128 == 0).count();
    Ok(BigUint::from(omega.d) * BigUint::from(hits))
}

/// The same count with `Omega` taken as a set and every `alpha(s)` ranging
/// over `0..=n`, read word for word.
pub fn count_closed_general_set_reading(n: u64, r: u64, m: u64) -> Result<BigUint> {
    let omega = residue_set_ranged(n, r, m, 0..=n, 0..=n)?;
    let distinct: BTreeSet<i128> = omega.values.into_iter().collect();
    let hits = distinct.iter().filter(|&&a| a % omega.d as i128 == 0).count();
    Ok(BigUint::from(omega.d) * BigUint::from(hits))
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodCount {
    pub method: String,
    /// `None` when the method does not apply.
    #[serde(with = "crate::bigjson::option")]
    pub count: Option<BigUint>,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconcileReport {
    pub n: u64,
    pub r: u64,
    pub m: u64,
    pub coprime: bool,
    pub convention: String,
    /// Enumeration, coprime closed form, free-choice count, general count.
    pub primary: Vec<MethodCount>,
    /// Other conventions and readings, for comparison only.
    pub secondary: Vec<MethodCount>,
    pub all_agree: bool,
    pub discrepancies: Vec<String>,
}

pub fn reconcile_counts(n: u64, r: u64, m: u64, conv: CountingConvention) -> Result<ReconcileReport> {
    check_params(n, r, m)?;
    let coprime = gcd(m, n - 1) == 1;
    let enumerated = BigUint::from(enumerate_orbit_vectors(n, r, m, conv)?.len());
    let primary = vec![
        MethodCount {
            method: "enumeration".into(),
            count: Some(enumerated),
            note: format!("exhaustive, {} convention", conv.name()),
        },
        MethodCount {
            method: "closed_coprime".into(),
            count: count_closed_coprime(n, m).ok(),
            note: "n^phi(m) - 1, requires gcd(m, n-1) = 1".into(),
        },
        MethodCount {
            method: "free_choice".into(),
            count: count_free_choice(n, m).ok(),
            note: "(n-1) n^(tau(m)-2), counts k_1 as determined; exact when gcd(m, n-1) = 1".into(),
        },
        MethodCount {
            method: "closed_general".into(),
            count: Some(count_closed_general(n, r, m)?),
            note: "d * #{a in Omega : d | a}, Omega as a multiset".into(),
        },
    ];
    let mut secondary = Vec::new();
    for other in [
        CountingConvention::statement(),
        CountingConvention::proof(),
        CountingConvention::literal(),
    ] {
        if other != conv {
            secondary.push(MethodCount {
                method: format!("enumeration_{}", other.name()),
                count: Some(BigUint::from(enumerate_orbit_vectors(n, r, m, other)?.len())),
                note: "exhaustive".into(),
            });
        }
    }
    secondary.push(MethodCount {
        method: "closed_general_set_reading".into(),
        count: Some(count_closed_general_set_reading(n, r, m)?),
        note: "Omega deduplicated, alpha in 0..=n".into(),
    });
    let reference = primary[0].count.clone();
    let mut discrepancies = Vec::new();
    for mc in &primary[1..] {
        match &mc.count {
            Some(c) if Some(c) != reference.as_ref() => discrepancies.push(format!(
                "{} gives {} but enumeration gives {}",
                mc.method,
                c,
                reference.as_ref().expect("enumeration always runs")
            )),
            None => discrepancies.push(format!("{} does not apply", mc.method)),
            _ => {}
        }
    }
    Ok(ReconcileReport {
        n,
        r,
        m,
        coprime,
        convention: conv.name(),
        all_agree: discrepancies.is_empty(),
        discrepancies,
        primary,
        secondary,
    })
}

/// A permutation of `0..len` as an image table.
type Perm = Vec<u8>;

fn compose(a: &[u8], b: &[u8]) -> Perm {
    // (a after b)(x) = a(b(x))
    b.iter().map(|&x| a[x as usize]).collect()
}

fn inverse(a: &[u8]) -> Perm {
    let mut inv = vec![0u8; a.len()];
    for (i, &x) in a.iter().enumerate() {
        inv[x as usize] = i as u8;
    }
    inv
}

/// The permutation with `k_s` cycles of length `s`, on consecutive points.
pub fn realize(orbit: &OrbitTypeVector) -> Vec<u8> {
    let mut perm = Vec::new();
    for (&s, &k) in &orbit.counts {
        for _ in 0..k {
            let base = perm.len() as u8;
            for i in 0..s as u8 {
                perm.push(base + (i + 1) % s as u8);
            }
        }
    }
    perm
}

fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeylReport {
    pub m: u64,
    pub orbit: String,
    pub points: u64,
    pub normalizer_order: u64,
    pub centralizer_order: u64,
    pub weyl_order: u64,
    /// `prod s^{k_s} k_s!`.
    #[serde(with = "crate::bigjson")]
    pub centralizer_formula: BigUint,
}

/// Normaliser and centraliser of `<c>` in the symmetric group on `|Y|`
/// points, by checking every permutation.
pub fn weyl_group(orbit: &OrbitTypeVector, cap: u64) -> Result<WeylReport> {
    let points = orbit.point_count();
    if points > cap {
        return Err(Error::Resource {
            what: "points for Weyl brute force",
            actual: points as u128,
            limit: cap as u128,
        });
    }
    if points > u8::MAX as u64 {
        return Err(Error::InvalidArgument("too many points".into()));
    }
    let order = orbit
        .counts
        .iter()
        .filter(|(_, &k)| k > 0)
        .fold(1u64, |acc, (&s, _)| lcm(acc, s));
    if order != orbit.m {
        return Err(Error::InvalidArgument(format!(
            "orbit type {orbit} generates a group of order {order}, not {}",
            orbit.m
        )));
    }
    let c = realize(orbit);
    let mut powers: BTreeSet<Perm> = BTreeSet::new();
    let mut acc: Perm = (0..points as u8).collect();
    for _ in 0..orbit.m {
        powers.insert(acc.clone());
        acc = compose(&c, &acc);
    }
    let mut g: Perm = (0..points as u8).collect();
    let (mut normalizer, mut centralizer) = (0u64, 0u64);
    loop {
        let conj = compose(&compose(&g, &c), &inverse(&g));
        if conj == c {
            centralizer += 1;
            normalizer += 1;
        } else if powers.contains(&conj) {
            normalizer += 1;
        }
        if !next_permutation(&mut g) {
            break;
        }
    }
    let formula = orbit
        .counts
        .iter()
        .map(|(&s, &k)| pow_big(s, k) * factorial(k))
        .product();
    Ok(WeylReport {
        m: orbit.m,
        orbit: orbit.to_string(),
        points,
        normalizer_order: normalizer,
        centralizer_order: centralizer,
        weyl_order: normalizer / centralizer,
        centralizer_formula: formula,
    })
}

pub fn weyl_group_order(orbit: &OrbitTypeVector, cap: u64) -> Result<u64> {
    Ok(weyl_group(orbit, cap)?.weyl_order)
}

/// Regular orbit: a single `m`-cycle.
pub fn regular_orbit(m: u64) -> OrbitTypeVector {
    let mut counts: BTreeMap<u64, u64> = divisors(m).into_iter().map(|d| (d, 0)).collect();
    counts.insert(m, 1);
    OrbitTypeVector { m, counts }
}

/// Number of classes of each order `m`, from the enumerator.
pub fn class_count(n: u64, r: u64, m: u64, conv: CountingConvention) -> Result<u64> {
    let len = enumerate_orbit_vectors(n, r, m, conv)?.len();
    len.to_u64()
        .ok_or_else(|| Error::InvalidArgument("class count overflow".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn enumeration_examples() {
        let v = enumerate_orbit_vectors(2, 1, 2, CountingConvention::proof()).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].k(1), v[0].k(2)), (1, 1));
        let v = enumerate_orbit_vectors(2, 1, 1, CountingConvention::statement()).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].k(1), 1);
        let v = enumerate_orbit_vectors(3, 1, 2, CountingConvention::literal()).unwrap();
        let mut brute = 0;
        for k1 in 0..3u64 {
            for k2 in 1..3u64 {
                if (k1 + 2 * k2) % 2 == 1 {
                    brute += 1;
                }
            }
        }
        assert_eq!(v.len(), brute);
    }

    #[test]
    fn closed_forms() {
        assert_eq!(count_closed_coprime(2, 2).unwrap(), big(1));
        assert_eq!(count_closed_coprime(2, 5).unwrap(), big(15));
        assert_eq!(count_closed_coprime(2, 1).unwrap(), big(1));
        assert!(count_closed_coprime(3, 2).is_err());
        assert_eq!(count_free_choice(2, 3).unwrap(), big(1));
        assert_eq!(count_free_choice(5, 1).unwrap(), big(1));
        assert_eq!(count_closed_general(2, 1, 2).unwrap(), big(1));
        assert_eq!(count_closed_general_set_reading(2, 1, 2).unwrap(), big(3));
    }

    #[test]
    fn general_count_matches_proof_enumeration() {
        for n in 2..=5u64 {
            for r in 1..=3u64 {
                for m in 1..=12u64 {
                    let e = enumerate_orbit_vectors(n, r, m, CountingConvention::proof()).unwrap().len() as u64;
                    assert_eq!(count_closed_general(n, r, m).unwrap(), big(e), "n {n} r {r} m {m}");
                }
            }
        }
    }

    #[test]
    fn residue_examples() {
        let o = residue_set(4, 1, 3).unwrap();
        assert_eq!(o.d, 3);
        assert_eq!(o.values, vec![0, -1, -2]);
        assert_eq!(count_closed_general(4, 1, 3).unwrap(), big(3));
    }

    #[test]
    fn reconcile() {
        let r = reconcile_counts(2, 1, 2, CountingConvention::default()).unwrap();
        assert!(r.all_agree, "{:?}", r.discrepancies);
        let r = reconcile_counts(2, 1, 3, CountingConvention::default()).unwrap();
        assert!(!r.all_agree);
        assert_eq!(r.primary[1].count, Some(big(3)));
        assert_eq!(r.primary[2].count, Some(big(1)));
    }

    #[test]
    fn orbit_parsing() {
        let o = OrbitTypeVector::parse(4, "k1=1,k2=0,k4=1").unwrap();
        assert_eq!(o.point_count(), 5);
        assert_eq!(o.to_string(), "k1=1,k2=0,k4=1");
        assert!(OrbitTypeVector::parse(4, "k3=1").is_err());
        assert!(OrbitTypeVector::parse(4, "k1=1,k1=2").is_err());
        assert!(OrbitTypeVector::parse(4, "k1").is_err());
        assert!(OrbitTypeVector::parse(4, "j1=1").is_err());
        assert!(OrbitTypeVector::parse(0, "").is_err());
    }

    #[test]
    fn weyl_examples() {
        assert_eq!(weyl_group_order(&regular_orbit(2), 8).unwrap(), 1);
        let w = weyl_group(&regular_orbit(3), 8).unwrap();
        assert_eq!((w.normalizer_order, w.centralizer_order, w.weyl_order), (6, 3, 2));
        assert_eq!(weyl_group_order(&regular_orbit(5), 8).unwrap(), 4);
        assert!(matches!(weyl_group(&regular_orbit(9), 8), Err(Error::Resource { .. })));
        let bad = OrbitTypeVector::parse(4, "k1=2").unwrap();
        assert!(weyl_group(&bad, 8).is_err());
    }
}
