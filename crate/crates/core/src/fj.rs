//! Ledger for the source of the rationalised Farrell-Jones assembly map.
//!
//! Centraliser homology is assembled from group homology by Kunneth. The
//! `Theta` dimensions and Weyl coinvariants are external inputs: a missing
//! entry stays unknown and is counted as such, never read as zero.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::arith::totient;
use crate::conj::{class_count, CountingConvention};
use crate::error::{Error, Result};

/// Cap on `m_max` for index enumeration.
pub const MAX_M: u64 = 4096;
/// Cap on table rows read from JSON.
pub const MAX_TABLE_ROWS: usize = 100_000;

/// `sum_d c_d t^d`, with coefficients possibly known only up to a degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoincarePolynomial {
    #[serde(serialize_with = "ser_coeffs")]
    coefficients: BTreeMap<u64, BigUint>,
    /// Coefficients above this degree are unknown. `None` means exact.
    known_through: Option<u64>,
}

fn ser_coeffs<S: Serializer>(c: &BTreeMap<u64, BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(c.iter().map(|(d, v)| (d.to_string(), v.to_string())))
}

impl PoincarePolynomial {
    pub fn one() -> Self {
        Self::from_betti(&[1])
    }

    /// Exact polynomial with `betti[d]` in degree `d`.
    pub fn from_betti(betti: &[u64]) -> Self {
        let coefficients = betti
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0)
            .map(|(d, &b)| (d as u64, BigUint::from(b)))
            .collect();
        Self {
            coefficients,
            known_through: None,
        }
    }

    /// Coefficients known only in degrees `0..=known_through`.
    pub fn truncated(betti: &BTreeMap<u64, u64>, known_through: u64) -> Self {
        let coefficients = betti
            .iter()
            .filter(|(&d, &b)| b != 0 && d <= known_through)
            .map(|(&d, &b)| (d, BigUint::from(b)))
            .collect();
        Self {
            coefficients,
            known_through: Some(known_through),
        }
    }

    /// `None` when the coefficient lies beyond the known range.
    pub fn coefficient(&self, degree: u64) -> Option<BigUint> {
        match self.known_through {
            Some(k) if degree > k => None,
            _ => Some(self.coefficients.get(&degree).cloned().unwrap_or_default()),
        }
    }

    pub fn known_through(&self) -> Option<u64> {
        self.known_through
    }

    pub fn support(&self) -> impl Iterator<Item = (u64, &BigUint)> {
        self.coefficients.iter().map(|(&d, c)| (d, c))
    }

    pub fn mul(&self, other: &Self) -> Self {
        // With constant terms 1, the product in degree d only needs degrees <= d.
        let known_through = match (self.known_through, other.known_through) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut coefficients: BTreeMap<u64, BigUint> = BTreeMap::new();
        for (&da, ca) in &self.coefficients {
            for (&db, cb) in &other.coefficients {
                let d = da + db;
                if known_through.is_some_and(|k| d > k) {
                    continue;
                }
                *coefficients.entry(d).or_default() += ca * cb;
            }
        }
        Self {
            coefficients,
            known_through,
        }
    }

    pub fn pow(&self, exp: u64) -> Self {
        let mut out = Self::one();
        for _ in 0..exp {
            out = out.mul(self);
        }
        if exp == 0 {
            out.known_through = self.known_through;
        }
        out
    }
}

/// `H_*(Z(C_m); Q)` as the `phi(m)`-th power of `H_*(G; Q)`.
pub fn centralizer_poincare(group_betti: &PoincarePolynomial, m: u64) -> Result<PoincarePolynomial> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if group_betti.coefficient(0) != Some(BigUint::one()) {
        return Err(Error::InvalidArgument(
            "group homology must have H_0 = Q (constant term 1)".into(),
        ));
    }
    Ok(group_betti.pow(totient(m)))
}

/// Note attached to every ledger about the centraliser exponent.
pub const EXPONENT_NOTE: &str =
    "centraliser exponent l = phi(m); the number of transitive C_m-sets is tau(m), which differs for composite m";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SummandIndex {
    pub m: u64,
    pub i: u64,
    pub p: u64,
    pub q: i64,
}

/// `0 <= p <= phi(m) s 2^(s-1)`, or `None` on overflow.
pub fn p_bound(m: u64, s: u64) -> Option<u64> {
    let two = 1u64.checked_shl(u32::try_from(s.checked_sub(1)?).ok()?)?;
    totient(m).checked_mul(s)?.checked_mul(two)
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexSet {
    pub n_deg: i64,
    pub s: u64,
    pub n_arity: u64,
    pub r: u64,
    pub m_max: u64,
    pub convention: String,
    pub class_counts: BTreeMap<u64, u64>,
    pub indices: Vec<SummandIndex>,
}

/// All `(m, i, p, q)` with `m <= m_max`, `i` up to the class count of
/// order `m`, `p + q = n_deg`, `q >= -1` and `p` within [`p_bound`].
pub fn fj_summand_indices(
    n_deg: i64,
    s: u64,
    n_arity: u64,
    r: u64,
    m_max: u64,
    conv: CountingConvention,
) -> Result<IndexSet> {
    if s == 0 {
        return Err(Error::InvalidArgument("s must be at least 1".into()));
    }
    if m_max > MAX_M {
        return Err(Error::Resource {
            what: "m_max",
            actual: m_max as u128,
            limit: MAX_M as u128,
        });
    }
    let per_m: Vec<(u64, u64, Vec<SummandIndex>)> = (1..=m_max)
        .into_par_iter()
        .map(|m| -> Result<_> {
            let count = class_count(n_arity, r, m, conv)?;
            let bound = p_bound(m, s).ok_or_else(|| Error::InvalidArgument("p bound overflows".into()))?;
            let mut out = Vec::new();
            // p = n_deg - q with q >= -1 means p <= n_deg + 1.
            let p_hi = (n_deg + 1).min(bound as i64);
            for i in 1..=count {
                for p in 0..=p_hi {
                    out.push(SummandIndex {
                        m,
                        i,
                        p: p as u64,
                        q: n_deg - p,
                    });
                }
            }
            Ok((m, count, out))
        })
        .collect::<Result<_>>()?;
    let mut class_counts = BTreeMap::new();
    let mut indices = Vec::new();
    for (m, count, idx) in per_m {
        class_counts.insert(m, count);
        indices.extend(idx);
    }
    Ok(IndexSet {
        n_deg,
        s,
        n_arity,
        r,
        m_max,
        convention: conv.name(),
        class_counts,
        indices,
    })
}

#[derive(Debug, Clone, Deserialize)]
struct ThetaRow {
    m: u64,
    q: i64,
    dim: u64,
}

/// External `dim Theta_{C_m}(K_q(Z[C_m]) (x) Q)` values keyed by `(m, q)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ThetaDimsTable {
    entries: BTreeMap<(u64, i64), u64>,
}

impl ThetaDimsTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, m: u64, q: i64, dim: u64) -> Result<()> {
        if let Some(old) = self.entries.insert((m, q), dim) {
            if old != dim {
                return Err(Error::Parse(format!("theta (m={m}, q={q}) given as {old} and {dim}")));
            }
        }
        Ok(())
    }

    pub fn get(&self, m: u64, q: i64) -> Option<u64> {
        self.entries.get(&(m, q)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `[{"m":2,"q":0,"dim":1}, ...]`.
    pub fn from_json(text: &str) -> Result<Self> {
        let rows: Vec<ThetaRow> = serde_json::from_str(text)?;
        if rows.len() > MAX_TABLE_ROWS {
            return Err(Error::Resource {
                what: "theta table rows",
                actual: rows.len() as u128,
                limit: MAX_TABLE_ROWS as u128,
            });
        }
        let mut t = Self::new();
        for row in rows {
            if row.m == 0 {
                return Err(Error::Parse("theta row with m = 0".into()));
            }
            t.insert(row.m, row.q, row.dim)?;
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Deserialize)]
struct CoinvariantRow {
    m: u64,
    i: u64,
    p: u64,
    q: i64,
    dim: u64,
}

/// External coinvariant dimensions keyed by summand index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoinvariantTable {
    entries: BTreeMap<SummandIndex, u64>,
}

impl CoinvariantTable {
    pub fn get(&self, idx: &SummandIndex) -> Option<u64> {
        self.entries.get(idx).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `[{"m":2,"i":1,"p":0,"q":0,"dim":1}, ...]`.
    pub fn from_json(text: &str) -> Result<Self> {
        let rows: Vec<CoinvariantRow> = serde_json::from_str(text)?;
        if rows.len() > MAX_TABLE_ROWS {
            return Err(Error::Resource {
                what: "coinvariant table rows",
                actual: rows.len() as u128,
                limit: MAX_TABLE_ROWS as u128,
            });
        }
        let mut entries = BTreeMap::new();
        for row in rows {
            let idx = SummandIndex {
                m: row.m,
                i: row.i,
                p: row.p,
                q: row.q,
            };
            if let Some(old) = entries.insert(idx, row.dim) {
                if old != row.dim {
                    return Err(Error::Parse(format!("coinvariant entry {idx:?} given twice")));
                }
            }
        }
        Ok(Self { entries })
    }
}

#[derive(Debug, Clone)]
pub enum CoinvariantMode {
    /// Coinvariants are at most the tensor product over `Q`.
    UpperBound,
    /// Caller-supplied dimensions.
    Table(CoinvariantTable),
    /// The Weyl group is declared to act trivially, so the product is exact.
    Trivial,
}

impl CoinvariantMode {
    pub fn name(&self) -> &'static str {
        match self {
            Self::UpperBound => "upper_bound",
            Self::Table(_) => "table",
            Self::Trivial => "trivial",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LedgerEntry {
    #[serde(flatten)]
    pub index: SummandIndex,
    #[serde(with = "crate::bigjson::option")]
    pub betti_p: Option<BigUint>,
    pub theta: Option<u64>,
    #[serde(with = "crate::bigjson::option")]
    pub contribution: Option<BigUint>,
    /// False when the contribution is only an upper bound.
    pub exact: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LedgerTotal {
    #[serde(with = "crate::bigjson")]
    pub known: BigUint,
    pub unknown_entries: usize,
    pub exact: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FjLedger {
    pub mode: String,
    pub notes: Vec<String>,
    pub entries: Vec<LedgerEntry>,
    /// Keyed by `q`.
    pub by_q: BTreeMap<i64, LedgerTotal>,
    pub total: LedgerTotal,
}

fn add_to(total: &mut LedgerTotal, e: &LedgerEntry) {
    match &e.contribution {
        Some(c) => total.known += c,
        None => total.unknown_entries += 1,
    }
    total.exact &= e.exact && e.contribution.is_some();
}

/// Assemble the ledger. `centralizers` maps `m` to `H_*(Z(C_m); Q)`.
pub fn fj_total_dimension(
    indices: &[SummandIndex],
    centralizers: &BTreeMap<u64, PoincarePolynomial>,
    theta: &ThetaDimsTable,
    mode: &CoinvariantMode,
) -> Result<FjLedger> {
    let mut entries = Vec::with_capacity(indices.len());
    for idx in indices {
        let poly = centralizers
            .get(&idx.m)
            .ok_or_else(|| Error::InvalidArgument(format!("no centraliser homology for m = {}", idx.m)))?;
        let betti_p = poly.coefficient(idx.p);
        let th = theta.get(idx.m, idx.q);
        let zero_factor = betti_p.as_ref().is_some_and(Zero::is_zero) || th == Some(0);
        let product = match (&betti_p, th) {
            (Some(b), Some(t)) => Some(b * t),
            _ if zero_factor => Some(BigUint::zero()),
            _ => None,
        };
        let (contribution, exact) = if zero_factor {
            (Some(BigUint::zero()), true)
        } else {
            match mode {
                CoinvariantMode::UpperBound => (product, false),
                CoinvariantMode::Trivial => (product, true),
                CoinvariantMode::Table(table) => match table.get(idx) {
                    Some(dim) => {
                        if let Some(p) = &product {
                            if BigUint::from(dim) > *p {
                                return Err(Error::Inconsistent(format!(
                                    "coinvariant dimension {dim} at {idx:?} exceeds the tensor product {p}"
                                )));
                            }
                        }
                        (Some(BigUint::from(dim)), true)
                    }
                    None => (None, false),
                },
            }
        };
        entries.push(LedgerEntry {
            index: *idx,
            betti_p,
            theta: th,
            contribution,
            exact,
        });
    }
    let mut by_q: BTreeMap<i64, LedgerTotal> = BTreeMap::new();
    let mut total = LedgerTotal {
        exact: true,
        ..LedgerTotal::default()
    };
    for e in &entries {
        add_to(
            by_q.entry(e.index.q).or_insert_with(|| LedgerTotal {
                exact: true,
                ..LedgerTotal::default()
            }),
            e,
        );
        add_to(&mut total, e);
    }
    let mut notes = vec![EXPONENT_NOTE.to_string()];
    if matches!(mode, CoinvariantMode::UpperBound) {
        notes.push("upper_bound mode: contributions bound the coinvariants from above".into());
    }
    Ok(FjLedger {
        mode: mode.name().into(),
        notes,
        entries,
        by_q,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::binomial;

    fn two_v() -> PoincarePolynomial {
        PoincarePolynomial::from_betti(&[1, 0, 0, 1])
    }

    #[test]
    fn kunneth_powers() {
        let c = centralizer_poincare(&two_v(), 5).unwrap();
        for d in 0..=14u64 {
            let want = if d % 3 == 0 { binomial(4, d / 3) } else { BigUint::zero() };
            assert_eq!(c.coefficient(d), Some(want), "degree {d}");
        }
        assert_eq!(centralizer_poincare(&two_v(), 1).unwrap(), two_v());
        let v = centralizer_poincare(&PoincarePolynomial::one(), 7).unwrap();
        assert_eq!(v, PoincarePolynomial::one());
        assert!(centralizer_poincare(&PoincarePolynomial::from_betti(&[2]), 2).is_err());
    }

    #[test]
    fn truncation_propagates() {
        let b: BTreeMap<u64, u64> = [(0, 1), (3, 1)].into();
        let c = centralizer_poincare(&PoincarePolynomial::truncated(&b, 8), 5).unwrap();
        assert_eq!(c.coefficient(6), Some(BigUint::from(6u32)));
        assert_eq!(c.coefficient(9), None);
    }

    #[test]
    fn index_examples() {
        let conv = CountingConvention::default();
        let set = fj_summand_indices(0, 2, 2, 1, 1, conv).unwrap();
        let got: Vec<_> = set.indices.iter().map(|x| (x.m, x.i, x.p, x.q)).collect();
        assert_eq!(got, vec![(1, 1, 0, 0), (1, 1, 1, -1)]);
        assert!(fj_summand_indices(-2, 2, 2, 1, 4, conv).unwrap().indices.is_empty());
        assert_eq!(p_bound(1, 2), Some(4));
        assert_eq!(p_bound(5, 3), Some(48));
    }

    #[test]
    fn ledger_modes() {
        let idx = [SummandIndex { m: 5, i: 1, p: 6, q: 0 }];
        let cents: BTreeMap<u64, PoincarePolynomial> = [(5, centralizer_poincare(&two_v(), 5).unwrap())].into();
        let mut theta = ThetaDimsTable::new();
        theta.insert(5, 0, 1).unwrap();
        let l = fj_total_dimension(&idx, &cents, &theta, &CoinvariantMode::Trivial).unwrap();
        assert_eq!(l.total.known, BigUint::from(6u32));
        assert!(l.total.exact);
        let l = fj_total_dimension(&idx, &cents, &theta, &CoinvariantMode::UpperBound).unwrap();
        assert!(!l.total.exact);
        let l = fj_total_dimension(&idx, &cents, &ThetaDimsTable::new(), &CoinvariantMode::Trivial).unwrap();
        assert_eq!(l.total.unknown_entries, 1);
        assert_eq!(l.entries[0].contribution, None);
        let mut zero = ThetaDimsTable::new();
        zero.insert(5, 0, 0).unwrap();
        let l = fj_total_dimension(&idx, &cents, &zero, &CoinvariantMode::UpperBound).unwrap();
        assert!(l.total.known.is_zero() && l.total.exact);
        let table = CoinvariantTable::from_json(r#"[{"m":5,"i":1,"p":6,"q":0,"dim":9}]"#).unwrap();
        assert!(fj_total_dimension(&idx, &cents, &theta, &CoinvariantMode::Table(table)).is_err());
    }

    #[test]
    fn table_parsing() {
        let t = ThetaDimsTable::from_json(r#"[{"m":2,"q":0,"dim":1},{"m":2,"q":0,"dim":1}]"#).unwrap();
        assert_eq!((t.len(), t.get(2, 0), t.get(2, 1)), (1, Some(1), None));
        assert!(ThetaDimsTable::from_json(r#"[{"m":2,"q":0,"dim":1},{"m":2,"q":0,"dim":2}]"#).is_err());
        assert!(ThetaDimsTable::from_json(r#"[{"m":2,"q":0,"dim":-1}]"#).is_err());
        assert!(ThetaDimsTable::from_json(r#"[{"m":0,"q":0,"dim":1}]"#).is_err());
        assert!(ThetaDimsTable::from_json("{").is_err());
    }
}
