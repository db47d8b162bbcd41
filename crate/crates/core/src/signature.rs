//! Colour signatures `(s; n_1, ..., n_s)` and the numerical constants derived
//! from them.
//!
//! A signature records how many descending operations a Cantor algebra has
//! and the arity of each one. Everything else in the crate (chain-length
//! bounds, the contractibility threshold, subset costs) is a function of it.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `s` for which colour subsets are materialised (`2^s` of them).
pub const MAX_SUBSET_COLOURS: usize = 16;

/// Number of colours together with their arities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColourSignature {
    arities: Vec<u64>,
}

impl ColourSignature {
    pub fn new(arities: Vec<u64>) -> Result<Self> {
        if arities.is_empty() {
            return Err(Error::InvalidSignature("s must be at least 1".into()));
        }
        if let Some((i, &n)) = arities.iter().enumerate().find(|(_, &n)| n < 2) {
            return Err(Error::InvalidSignature(format!(
                "arity n_{} = {} is below 2",
                i + 1,
                n
            )));
        }
        Ok(Self { arities })
    }

    /// Build from an explicit `s` and arity list, checking they agree.
    pub fn with_s(s: u64, arities: Vec<u64>) -> Result<Self> {
        if s as usize != arities.len() {
            return Err(Error::InvalidSignature(format!(
                "s = {} but {} arities given",
                s,
                arities.len()
            )));
        }
        Self::new(arities)
    }

    /// The Brin-Thompson signature `sV_{n}`: `s` colours all of arity `n`.
    pub fn uniform(s: usize, n: u64) -> Result<Self> {
        Self::new(vec![n; s])
    }

    pub fn s(&self) -> usize {
        self.arities.len()
    }

    pub fn arities(&self) -> &[u64] {
        &self.arities
    }

    /// Arity of colour `i` (1-based).
    pub fn arity(&self, colour: usize) -> u64 {
        self.arities[colour - 1]
    }

    /// True when all colours share one arity (the `sV_{n,r}` family).
    pub fn is_uniform(&self) -> bool {
        self.arities.windows(2).all(|w| w[0] == w[1])
    }

    pub fn derived_constants(&self) -> DerivedConstants {
        derived_constants(self)
    }

    /// Every nonempty colour subset, in canonical order.
    pub fn nonempty_subsets(&self) -> Result<Vec<ColourSet>> {
        self.check_subset_capacity()?;
        let s = self.s();
        let mut all: Vec<ColourSet> = (1u32..(1u32 << s)).map(ColourSet).collect();
        all.sort();
        Ok(all)
    }

    pub(crate) fn check_subset_capacity(&self) -> Result<()> {
        if self.s() > MAX_SUBSET_COLOURS {
            return Err(Error::Resource {
                what: "colour count for subset enumeration",
                actual: self.s() as u128,
                limit: MAX_SUBSET_COLOURS as u128,
            });
        }
        Ok(())
    }

    /// Parse the JSON config form `{"s":2,"arities":[2,2]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SignatureConfig = serde_json::from_str(text)?;
        Self::with_s(raw.s, raw.arities)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SignatureConfig::from(self)).expect("plain struct serialises")
    }
}

impl fmt::Display for ColourSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.arities.iter().map(u64::to_string).collect();
        write!(f, "s={} ({})", self.s(), list.join(","))
    }
}

/// Serialised shape of a signature.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureConfig {
    pub s: u64,
    pub arities: Vec<u64>,
}

impl From<&ColourSignature> for SignatureConfig {
    fn from(sig: &ColourSignature) -> Self {
        Self {
            s: sig.s() as u64,
            arities: sig.arities.clone(),
        }
    }
}

impl Serialize for ColourSignature {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SignatureConfig::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ColourSignature {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = SignatureConfig::deserialize(deserializer)?;
        ColourSignature::with_s(raw.s, raw.arities).map_err(serde::de::Error::custom)
    }
}

/// Parse a comma separated arity list such as `2,2,3`.
pub fn parse_arities(text: &str) -> Result<Vec<u64>> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::Parse("empty arity list".into()));
    }
    trimmed
        .split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("bad arity {:?}: {}", piece.trim(), e)))
        })
        .collect()
}

/// Constants attached to a signature. All exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// `N = n_1 ... n_s`, leaves of the maximal elementary expansion of one element.
    #[serde(with = "crate::bigjson")]
    pub n: BigUint,
    /// `N^ = (n_1 + 1) ... (n_s + 1)`.
    #[serde(with = "crate::bigjson")]
    pub n_hat: BigUint,
    /// `t = N - 1`, the leaf gain of that expansion.
    #[serde(with = "crate::bigjson")]
    pub t: BigUint,
    /// `D(s) = s 2^(s-1)`, the longest chain in the ambient poset.
    #[serde(with = "crate::bigjson")]
    pub d: BigUint,
    /// `N^ - 2^s`: once the width reaches this, the reduced poset has a top.
    #[serde(with = "crate::bigjson")]
    pub vanish_threshold: BigUint,
}

impl DerivedConstants {
    pub fn d_usize(&self) -> Option<usize> {
        self.d.to_usize()
    }

    pub fn t_u64(&self) -> Option<u64> {
        self.t.to_u64()
    }

    pub fn threshold_u64(&self) -> Option<u64> {
        self.vanish_threshold.to_u64()
    }
}

pub fn derived_constants(sig: &ColourSignature) -> DerivedConstants {
    let s = sig.s();
    let n: BigUint = sig.arities.iter().map(|&a| BigUint::from(a)).product();
    let n_hat: BigUint = sig.arities.iter().map(|&a| BigUint::from(a) + 1u32).product();
    let two_s = BigUint::one() << s;
    let d = BigUint::from(s) * (BigUint::one() << (s - 1));
    DerivedConstants {
        t: &n - 1u32,
        vanish_threshold: &n_hat - &two_s,
        n,
        n_hat,
        d,
    }
}

/// A subset of the colours `{1, ..., s}`, stored as a bitmask (colour `i`
/// is bit `i - 1`). Ordered lexicographically by sorted colour list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ColourSet(pub(crate) u32);

impl ColourSet {
    pub const EMPTY: ColourSet = ColourSet(0);

    /// From 1-based colour indices. Duplicates are ignored.
    pub fn from_colours(colours: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for &c in colours {
            if c == 0 || c > 32 {
                return Err(Error::InvalidArgument(format!("colour index {c} out of range")));
            }
            bits |= 1 << (c - 1);
        }
        Ok(Self(bits))
    }

    pub fn from_bits(bits: u32) -> Self {
        Self(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, colour: usize) -> bool {
        (1..=32).contains(&colour) && self.0 & (1 << (colour - 1)) != 0
    }

    pub fn is_subset(self, other: ColourSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Sorted 1-based colour list.
    pub fn colours(self) -> Vec<usize> {
        (0..32).filter(|b| self.0 & (1 << b) != 0).map(|b| b + 1).collect()
    }

    pub fn fits(self, sig: &ColourSignature) -> bool {
        sig.s() >= 32 || self.0 >> sig.s() == 0
    }
}

impl Ord for ColourSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.colours().cmp(&other.colours())
    }
}

impl PartialOrd for ColourSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ColourSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.colours().iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for ColourSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.colours().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ColourSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let colours = Vec::<usize>::deserialize(deserializer)?;
        ColourSet::from_colours(&colours).map_err(serde::de::Error::custom)
    }
}

/// `N_Omega`, the number of pieces produced by applying every colour of
/// `omega` once to a single element. The cost of that expansion is one less.
pub fn subset_weight(sig: &ColourSignature, omega: ColourSet) -> Result<BigUint> {
    check_subset(sig, omega)?;
    Ok(omega
        .colours()
        .into_iter()
        .map(|c| BigUint::from(sig.arity(c)))
        .product())
}

/// `N_Omega - 1` as a machine integer, or `None` if it does not fit.
pub(crate) fn subset_cost_u64(sig: &ColourSignature, omega: ColourSet) -> Result<Option<u64>> {
    check_subset(sig, omega)?;
    let mut acc = 1u64;
    for c in omega.colours() {
        match acc.checked_mul(sig.arity(c)) {
            Some(v) => acc = v,
            None => return Ok(None),
        }
    }
    Ok(Some(acc - 1))
}

fn check_subset(sig: &ColourSignature, omega: ColourSet) -> Result<()> {
    if omega.is_empty() {
        return Err(Error::InvalidArgument("colour subset must be nonempty".into()));
    }
    if !omega.fits(sig) {
        return Err(Error::InvalidArgument(format!(
            "colour subset {} is not contained in {{1..{}}}",
            omega,
            sig.s()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(a: &[u64]) -> ColourSignature {
        ColourSignature::new(a.to_vec()).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn constants_two_colours() {
        let c = derived_constants(&sig(&[2, 2]));
        assert_eq!(c.n, big(4));
        assert_eq!(c.n_hat, big(9));
        assert_eq!(c.t, big(3));
        assert_eq!(c.d, big(4));
        assert_eq!(c.vanish_threshold, big(5));
    }

    #[test]
    fn constants_one_and_three_colours() {
        assert_eq!(derived_constants(&sig(&[5])).d, big(1));
        let c = derived_constants(&sig(&[2, 2, 2]));
        assert_eq!(
            (c.n, c.n_hat, c.t, c.d, c.vanish_threshold),
            (big(8), big(27), big(7), big(12), big(19))
        );
    }

    #[test]
    fn rejects_bad_signatures() {
        assert!(ColourSignature::new(vec![]).is_err());
        assert!(ColourSignature::new(vec![2, 1]).is_err());
        assert!(ColourSignature::with_s(3, vec![2, 2]).is_err());
    }

    #[test]
    fn subset_weights() {
        let s22 = sig(&[2, 2]);
        let s23 = sig(&[2, 3]);
        let one = ColourSet::from_colours(&[1]).unwrap();
        let both = ColourSet::from_colours(&[1, 2]).unwrap();
        assert_eq!(subset_weight(&s22, one).unwrap(), big(2));
        assert_eq!(subset_weight(&s22, both).unwrap(), big(4));
        assert_eq!(subset_weight(&s23, both).unwrap(), big(6));
        assert!(subset_weight(&s22, ColourSet::EMPTY).is_err());
        assert!(subset_weight(&s22, ColourSet::from_colours(&[3]).unwrap()).is_err());
    }

    #[test]
    fn total_cost_matches_threshold() {
        // sum over nonempty subsets of (N_Omega - 1) equals N^ - 2^s
        let cases: Vec<Vec<u64>> = vec![
            vec![2],
            vec![7],
            vec![2, 2],
            vec![2, 3],
            vec![5, 4],
            vec![2, 2, 2],
            vec![2, 3, 4],
            vec![2, 2, 2, 2],
            vec![3, 2, 5, 2],
        ];
        for a in cases {
            let g = sig(&a);
            let total: BigUint = g
                .nonempty_subsets()
                .unwrap()
                .into_iter()
                .map(|o| subset_weight(&g, o).unwrap() - 1u32)
                .sum();
            assert_eq!(total, derived_constants(&g).vanish_threshold, "{a:?}");
        }
    }

    #[test]
    fn derived_invariants_hold() {
        for a in [vec![2], vec![2, 2], vec![3, 2], vec![2, 2, 2], vec![9, 9, 9, 9]] {
            let c = derived_constants(&sig(&a));
            let two_s = BigUint::one() << a.len();
            assert!(c.n >= two_s);
            assert!(c.n_hat > c.n);
            assert!(c.d >= BigUint::one());
            assert!(c.vanish_threshold >= BigUint::one());
        }
    }

    #[test]
    fn large_arities_stay_exact() {
        let g = sig(&[u64::MAX, u64::MAX]);
        let c = derived_constants(&g);
        assert_eq!(c.n, BigUint::from(u64::MAX) * BigUint::from(u64::MAX));
        assert_eq!(subset_cost_u64(&g, ColourSet::from_colours(&[1, 2]).unwrap()).unwrap(), None);
    }

    #[test]
    fn canonical_subset_order() {
        let g = sig(&[2, 2, 2]);
        let subsets: Vec<Vec<usize>> = g.nonempty_subsets().unwrap().into_iter().map(|c| c.colours()).collect();
        assert_eq!(
            subsets,
            vec![vec![1], vec![1, 2], vec![1, 2, 3], vec![1, 3], vec![2], vec![2, 3], vec![3]]
        );
    }

    #[test]
    fn json_config_round_trip() {
        let g = ColourSignature::from_json(r#"{"s":2,"arities":[2,3]}"#).unwrap();
        assert_eq!(g.arities(), &[2, 3]);
        assert_eq!(ColourSignature::from_json(&g.to_json()).unwrap(), g);
        assert!(ColourSignature::from_json(r#"{"s":3,"arities":[2,3]}"#).is_err());
        assert!(ColourSignature::from_json(r#"{"s":1,"arities":[1]}"#).is_err());
        assert_eq!(parse_arities(" 2, 3 ,4").unwrap(), vec![2, 3, 4]);
        assert!(parse_arities("2,,3").is_err());
        assert!(parse_arities("").is_err());
    }
}
