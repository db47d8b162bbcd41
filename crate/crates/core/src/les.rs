//! Dimension bookkeeping over long exact sequences of finite-dimensional
//! rational vector spaces.
//!
//! Terms are homology groups of the quotients `Y_{p+a,p+b}`, of the posets
//! `Z_{p+a,p+b}`, and of the group itself, with `p` symbolic. A
//! [`FactLedger`] stores known dimensions with citations, identifications
//! between terms, and an ordered proof log. [`saturate`] applies four sound
//! rules to a fixed point:
//!
//! * R1: in a run `0 -> A_1 -> ... -> A_r -> 0` the alternating sum of
//!   dimensions is zero; solved when a single unknown remains.
//! * R2: `0 -> A -> B` gives `dim A <= dim B`.
//! * R3: `A -> B -> 0` gives `dim B <= dim A`.
//! * R4: `0 -> A -> B -> 0` gives `dim A = dim B` (also when both unknown).
//!
//! All `Y` and `Z` homology is reduced. Terms of equal width are
//! identified ("width-translation"), so facts are keyed on width and degree
//! rather than on concrete offsets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::signature::ColourSignature;
use crate::zfn;

pub const CITE_DIMENSION: &str = "dimension bound: Y_{a,b} has dimension b - a";
pub const CITE_POINT: &str = "point: Y_{q,q} is zero-dimensional and connected";
pub const CITE_STABILITY: &str = "stability: X_{p,q} is k-connected for p large, so H_k(Y_{p,p+tk}) = H_k(G)";
pub const CITE_SIMPLE: &str = "simplicity: the group is simple, so H_1(G) = 0";
pub const CITE_REDUCED: &str = "reduced convention: H~_0(G) = 0, reported as H_0(G) = Q";
pub const CITE_WIDTH: &str = "width-translation: for p large, truncations of equal width have equal homology";
pub const CITE_EXACT: &str = "exactness of the pair sequence";

/// A homology group appearing in a sequence. Offsets are relative to `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HomTerm {
    /// `H~_degree(Y_{p+lo, p+hi})`.
    Y { lo: i64, hi: i64, degree: u32 },
    /// `H~_degree(Z_{p+lo, p+hi})`, expansions of a `(p+lo-1)`-element basis.
    Z { lo: i64, hi: i64, degree: u32 },
    /// `H~_k(G)`.
    Group { degree: u32 },
    Zero,
    /// A known space `Q^dim`.
    Const { dim: u64 },
}

/// What a term is identified with once offsets are forgotten.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermKey {
    Y { width: i64, degree: u32 },
    Z { delta: i64, degree: u32 },
    Group(u32),
    Zero,
    Const(u64),
}

impl HomTerm {
    pub fn y(lo: i64, hi: i64, degree: u32) -> Self {
        HomTerm::Y { lo, hi, degree }
    }

    pub fn z(lo: i64, hi: i64, degree: u32) -> Self {
        HomTerm::Z { lo, hi, degree }
    }

    pub fn group(degree: u32) -> Self {
        HomTerm::Group { degree }
    }

    pub fn key(self) -> TermKey {
        match self {
            HomTerm::Y { lo, hi, degree } => TermKey::Y { width: hi - lo, degree },
            HomTerm::Z { lo, hi, degree } => TermKey::Z {
                delta: hi - lo + 1,
                degree,
            },
            HomTerm::Group { degree } => TermKey::Group(degree),
            HomTerm::Zero => TermKey::Zero,
            HomTerm::Const { dim } => TermKey::Const(dim),
        }
    }
}

fn offset(v: i64) -> String {
    match v {
        0 => "p".into(),
        v if v > 0 => format!("p+{v}"),
        v => format!("p{v}"),
    }
}

impl fmt::Display for HomTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            HomTerm::Y { lo, hi, degree } => write!(f, "H~_{degree}(Y[{},{}])", offset(lo), offset(hi)),
            HomTerm::Z { lo, hi, degree } => write!(f, "H~_{degree}(Z[{},{}])", offset(lo), offset(hi)),
            HomTerm::Group { degree } => write!(f, "H~_{degree}(G)"),
            HomTerm::Zero => f.write_str("0"),
            HomTerm::Const { dim } => write!(f, "Q^{dim}"),
        }
    }
}

impl fmt::Display for TermKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TermKey::Y { width, degree } => write!(f, "H~_{degree}(Y width {width})"),
            TermKey::Z { delta, degree } => write!(f, "H~_{degree}(Z delta {delta})"),
            TermKey::Group(k) => write!(f, "H~_{k}(G)"),
            TermKey::Zero => f.write_str("0"),
            TermKey::Const(d) => write!(f, "Q^{d}"),
        }
    }
}

/// A finite segment of an exact sequence. Exactness is only used at
/// positions strictly inside the segment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LesInstance {
    label: String,
    terms: Vec<HomTerm>,
}

impl LesInstance {
    /// The sequence of the pair `Y_{p+lo+1,p+hi} ⊂ Y_{p+lo,p+hi}` whose
    /// relative homology is `H~_{*-1}(Z_{p+lo+1,p+hi})`, from
    /// `H~_top(Z)` down to the final zero:
    ///
    /// `H~_i(Z) -> H_i(Y_{lo+1}) -> H_i(Y_lo) -> H~_{i-1}(Z) -> ... -> H~_0(Y_lo) -> 0`.
    pub fn pair(lo: i64, hi: i64, top: u32) -> Self {
        let mut terms = Vec::with_capacity(3 * top as usize + 4);
        for i in (0..=top).rev() {
            terms.push(HomTerm::z(lo + 1, hi, i));
            terms.push(HomTerm::y(lo + 1, hi, i));
            terms.push(HomTerm::y(lo, hi, i));
        }
        terms.push(HomTerm::Zero);
        Self {
            label: format!("pair (Y[{},{}], Y[{},{}])", offset(lo), offset(hi), offset(lo + 1), offset(hi)),
            terms,
        }
    }

    /// The three-term window `H_k(Y_{lo+1}) -> H_k(Y_lo) -> H~_{k-1}(Z_{lo+1})`
    /// of the same pair sequence.
    pub fn window(lo: i64, hi: i64, degree: u32) -> Self {
        assert!(degree >= 1, "window needs degree >= 1");
        Self {
            label: format!(
                "degree {degree} window of pair (Y[{},{}], Y[{},{}])",
                offset(lo),
                offset(hi),
                offset(lo + 1),
                offset(hi)
            ),
            terms: vec![
                HomTerm::y(lo + 1, hi, degree),
                HomTerm::y(lo, hi, degree),
                HomTerm::z(lo + 1, hi, degree - 1),
            ],
        }
    }

    /// An arbitrary exact segment.
    pub fn custom(label: impl Into<String>, terms: Vec<HomTerm>) -> Self {
        Self {
            label: label.into(),
            terms,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn terms(&self) -> &[HomTerm] {
        &self.terms
    }
}

/// One entry of the proof log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofStep {
    pub rule: String,
    pub segment: Vec<String>,
    pub conclusion: String,
    pub citation: String,
    #[serde(skip)]
    pub detail: StepDetail,
}

/// Machine-checkable content of a step.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum StepDetail {
    #[default]
    Note,
    Value { term: TermKey, value: u64 },
    Equal { a: TermKey, b: TermKey },
    /// `target` solved from the alternating sum over `run`, whose first and
    /// last entries are the flanking zeros.
    Solve { run: Vec<TermKey>, target: TermKey, value: u64 },
    Bound { term: TermKey, by: TermKey, upper: u64 },
}

/// Known dimensions, identifications and the log that produced them.
#[derive(Debug, Clone, Default)]
pub struct FactLedger {
    index: BTreeMap<TermKey, usize>,
    parent: Vec<usize>,
    value: Vec<Option<(u64, String)>>,
    upper: Vec<Option<u64>>,
    log: Vec<ProofStep>,
    seen_at: BTreeMap<TermKey, HomTerm>,
}

impl FactLedger {
    pub fn new() -> Self {
        Self::default()
    }

    fn class(&mut self, key: TermKey) -> usize {
        if let Some(&i) = self.index.get(&key) {
            return self.find(i);
        }
        let i = self.parent.len();
        self.parent.push(i);
        let intrinsic = match key {
            TermKey::Zero => Some((0, "zero term".to_string())),
            TermKey::Const(d) => Some((d, "given".to_string())),
            _ => None,
        };
        self.value.push(intrinsic);
        self.upper.push(None);
        self.index.insert(key, i);
        i
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn find_key(&self, key: TermKey) -> Option<usize> {
        let mut i = *self.index.get(&key)?;
        while self.parent[i] != i {
            i = self.parent[i];
        }
        Some(i)
    }

    /// Known dimension of `term`.
    pub fn value(&self, term: HomTerm) -> Option<u64> {
        self.value_key(term.key())
    }

    pub fn value_key(&self, key: TermKey) -> Option<u64> {
        match key {
            TermKey::Zero => Some(0),
            TermKey::Const(d) => Some(d),
            _ => self.find_key(key).and_then(|c| self.value[c].as_ref().map(|v| v.0)),
        }
    }

    /// Citation attached to the known value.
    pub fn citation(&self, term: HomTerm) -> Option<&str> {
        let c = self.find_key(term.key())?;
        self.value[c].as_ref().map(|v| v.1.as_str())
    }

    pub fn upper_bound(&self, term: HomTerm) -> Option<u64> {
        self.find_key(term.key()).and_then(|c| self.upper[c])
    }

    pub fn log(&self) -> &[ProofStep] {
        &self.log
    }

    /// Every term with a known value, by canonical key.
    pub fn assignment(&self) -> BTreeMap<TermKey, u64> {
        self.index
            .keys()
            .filter_map(|&k| self.value_key(k).map(|v| (k, v)))
            .collect()
    }

    /// Terms registered but still unknown.
    pub fn unknowns(&self) -> Vec<TermKey> {
        self.index
            .keys()
            .copied()
            .filter(|&k| self.value_key(k).is_none())
            .collect()
    }

    fn set_value(&mut self, key: TermKey, value: u64, citation: &str) -> Result<bool> {
        let c = self.class(key);
        match &self.value[c] {
            Some((existing, existing_citation)) if *existing != value => Err(Error::Conflict {
                term: key.to_string(),
                existing: *existing,
                existing_citation: existing_citation.clone(),
                new: value,
                new_citation: citation.to_string(),
            }),
            Some(_) => Ok(false),
            None => {
                if let Some(u) = self.upper[c] {
                    if value > u {
                        return Err(Error::Inconsistent(format!(
                            "{key} = {value} exceeds its upper bound {u}"
                        )));
                    }
                }
                self.value[c] = Some((value, citation.to_string()));
                Ok(true)
            }
        }
    }

    /// Record `dim term = dim` on the authority of `citation`.
    pub fn inject_fact(&mut self, term: HomTerm, dim: u64, citation: &str) -> Result<()> {
        if self.set_value(term.key(), dim, citation)? {
            self.log.push(ProofStep {
                rule: "axiom".into(),
                segment: vec![term.to_string()],
                conclusion: format!("{term} = {dim}"),
                citation: citation.into(),
                detail: StepDetail::Value {
                    term: term.key(),
                    value: dim,
                },
            });
        }
        Ok(())
    }

    /// Record `a ≅ b` on the authority of `citation`.
    pub fn inject_equal(&mut self, a: HomTerm, b: HomTerm, citation: &str) -> Result<()> {
        if self.union(a.key(), b.key(), citation)? {
            self.log.push(ProofStep {
                rule: "axiom".into(),
                segment: vec![a.to_string(), b.to_string()],
                conclusion: format!("{a} = {b}"),
                citation: citation.into(),
                detail: StepDetail::Equal { a: a.key(), b: b.key() },
            });
        }
        Ok(())
    }

    fn union(&mut self, a: TermKey, b: TermKey, citation: &str) -> Result<bool> {
        let (ca, cb) = (self.class(a), self.class(b));
        if ca == cb {
            return Ok(false);
        }
        let merged = match (self.value[ca].clone(), self.value[cb].clone()) {
            (Some(x), Some(y)) if x.0 != y.0 => {
                return Err(Error::Conflict {
                    term: format!("{a} = {b}"),
                    existing: x.0,
                    existing_citation: x.1,
                    new: y.0,
                    new_citation: format!("{} via {}", y.1, citation),
                })
            }
            (x, y) => x.or(y),
        };
        let upper = match (self.upper[ca], self.upper[cb]) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        if let (Some((v, _)), Some(u)) = (&merged, upper) {
            if *v > u {
                return Err(Error::Inconsistent(format!("{a} = {b} = {v} exceeds upper bound {u}")));
            }
        }
        self.parent[cb] = ca;
        self.value[ca] = merged;
        self.upper[ca] = upper;
        Ok(true)
    }

    fn tighten(&mut self, key: TermKey, upper: u64) -> Result<bool> {
        let c = self.class(key);
        if let Some((v, _)) = &self.value[c] {
            if *v > upper {
                return Err(Error::Inconsistent(format!("{key} = {v} exceeds bound {upper}")));
            }
            return Ok(false);
        }
        if self.upper[c].is_some_and(|u| u <= upper) {
            return Ok(false);
        }
        self.upper[c] = Some(upper);
        Ok(true)
    }

    /// Register a concrete term; notes width-translation when the same key
    /// was first met at other offsets.
    fn register(&mut self, term: HomTerm) {
        let key = term.key();
        self.class(key);
        match self.seen_at.get(&key) {
            None => {
                self.seen_at.insert(key, term);
            }
            Some(&first) if first != term && matches!(term, HomTerm::Y { .. } | HomTerm::Z { .. }) => {
                // only note each offset pair once
                let note = format!("{term} = {first}");
                if !self.log.iter().any(|s| s.conclusion == note) {
                    self.log.push(ProofStep {
                        rule: "axiom:width-translation".into(),
                        segment: vec![term.to_string(), first.to_string()],
                        conclusion: note,
                        citation: CITE_WIDTH.into(),
                        detail: StepDetail::Note,
                    });
                }
            }
            Some(_) => {}
        }
    }
}

/// Source of `H~_degree(Z)` values for a given width `delta`.
pub trait ZSource {
    /// `Ok(None)` leaves the term unknown.
    fn z_homology(&mut self, delta: i64, degree: u32) -> Result<Option<(u64, String)>>;
}

/// Automatic facts applied to registered terms before the rules run.
pub struct Axioms<'a> {
    pub dimension_bound: bool,
    pub point_at_zero_width: bool,
    pub z_source: Option<&'a mut dyn ZSource>,
}

impl Default for Axioms<'_> {
    fn default() -> Self {
        Self {
            dimension_bound: true,
            point_at_zero_width: true,
            z_source: None,
        }
    }
}

/// Register the instances' terms, apply the axioms, then run R1-R4 to a
/// fixed point. Instances are visited in the order given.
pub fn saturate(ledger: &mut FactLedger, instances: &[LesInstance], axioms: Axioms<'_>) -> Result<()> {
    let mut z_source = axioms.z_source;
    for inst in instances {
        for &term in &inst.terms {
            ledger.register(term);
            match term {
                HomTerm::Y { lo, hi, degree } => {
                    let width = hi - lo;
                    if width < 0 {
                        return Err(Error::InvalidArgument(format!("{term} has negative width")));
                    }
                    if axioms.dimension_bound && degree as i64 > width {
                        ledger.inject_fact(term, 0, CITE_DIMENSION)?;
                    } else if axioms.point_at_zero_width && width == 0 {
                        ledger.inject_fact(term, 0, CITE_POINT)?;
                    }
                }
                HomTerm::Z { degree, .. }
                    if ledger.value(term).is_none() => {
                        if let Some(src) = z_source.as_deref_mut() {
                            let TermKey::Z { delta, .. } = term.key() else { unreachable!() };
                            if let Some((v, cite)) = src.z_homology(delta, degree)? {
                                ledger.inject_fact(term, v, &cite)?;
                            }
                        }
                    }
                _ => {}
            }
        }
    }
    loop {
        let mut changed = false;
        for inst in instances {
            changed |= apply_rules(ledger, inst)?;
        }
        if !changed {
            break;
        }
    }
    Ok(())
}

fn render(ledger: &FactLedger, term: HomTerm) -> String {
    match term {
        HomTerm::Zero => "0".into(),
        _ => match ledger.value(term) {
            Some(v) => format!("{term}={v}"),
            None => format!("{term}=?"),
        },
    }
}

fn apply_rules(ledger: &mut FactLedger, inst: &LesInstance) -> Result<bool> {
    let mut changed = false;
    let terms = &inst.terms;
    let zeros: Vec<usize> = (0..terms.len()).filter(|&i| ledger.value(terms[i]) == Some(0)).collect();
    for w in zeros.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b == a + 1 {
            continue;
        }
        let run = &terms[a + 1..b];
        let mut known_sum: i128 = 0;
        let mut unknown: BTreeMap<usize, (i128, HomTerm)> = BTreeMap::new();
        for (i, &t) in run.iter().enumerate() {
            let sign: i128 = if i % 2 == 0 { 1 } else { -1 };
            match ledger.value(t) {
                Some(v) => known_sum += sign * v as i128,
                None => {
                    let c = ledger.class(t.key());
                    unknown.entry(c).or_insert((0, t)).0 += sign;
                }
            }
        }
        unknown.retain(|_, (coef, _)| *coef != 0);
        let segment: Vec<String> = terms[a..=b].iter().map(|&t| render(ledger, t)).collect();
        let run_keys: Vec<TermKey> = terms[a..=b].iter().map(|t| t.key()).collect();
        match unknown.len() {
            0 => {
                if known_sum != 0 && run.iter().all(|&t| ledger.value(t).is_some()) {
                    return Err(Error::Inconsistent(format!(
                        "alternating sum {known_sum} != 0 on {} in {}",
                        segment.join(" -> "),
                        inst.label
                    )));
                }
            }
            1 => {
                let (coef, target) = *unknown.values().next().expect("one unknown");
                let value = -known_sum / coef;
                if value * coef != -known_sum || value < 0 {
                    return Err(Error::Inconsistent(format!(
                        "no nonnegative solution for {target} on {} in {}",
                        segment.join(" -> "),
                        inst.label
                    )));
                }
                let value = value as u64;
                let rule = if run.len() == 2 { "R4" } else { "R1" };
                let citation = format!("{CITE_EXACT} {}", inst.label);
                ledger.set_value(target.key(), value, &citation)?;
                ledger.log.push(ProofStep {
                    rule: rule.into(),
                    segment,
                    conclusion: format!("{target} = {value}"),
                    citation,
                    detail: StepDetail::Solve {
                        run: run_keys,
                        target: target.key(),
                        value,
                    },
                });
                changed = true;
            }
            2 if run.len() == 2 && known_sum == 0 => {
                let citation = format!("{CITE_EXACT} {}", inst.label);
                if ledger.union(run[0].key(), run[1].key(), &citation)? {
                    ledger.log.push(ProofStep {
                        rule: "R4".into(),
                        segment,
                        conclusion: format!("{} = {}", run[0], run[1]),
                        citation,
                        detail: StepDetail::Equal {
                            a: run[0].key(),
                            b: run[1].key(),
                        },
                    });
                    changed = true;
                }
            }
            _ => {}
        }
    }
    // R2 / R3 bounds next to a zero
    for &z in &zeros {
        let pairs = [
            (z + 1, z + 2, "R2"),
            (z.wrapping_sub(1), z.wrapping_sub(2), "R3"),
        ];
        for (x, y, rule) in pairs {
            if x >= terms.len() || y >= terms.len() {
                continue;
            }
            let (tx, ty) = (terms[x], terms[y]);
            if ledger.value(tx).is_some() {
                continue;
            }
            if let Some(bound) = ledger.value(ty) {
                if ledger.tighten(tx.key(), bound)? {
                    let seg = if rule == "R2" {
                        vec!["0".to_string(), render(ledger, tx), render(ledger, ty)]
                    } else {
                        vec![render(ledger, ty), render(ledger, tx), "0".to_string()]
                    };
                    ledger.log.push(ProofStep {
                        rule: rule.into(),
                        segment: seg,
                        conclusion: format!("{tx} <= {bound}"),
                        citation: format!("{CITE_EXACT} {}", inst.label),
                        detail: StepDetail::Bound {
                            term: tx.key(),
                            by: ty.key(),
                            upper: bound,
                        },
                    });
                    changed = true;
                }
            }
        }
    }
    Ok(changed)
}

/// Re-execute a proof log from its axioms alone and return the resulting
/// assignment. Every solved value must be reproduced by its rule.
pub fn replay(log: &[ProofStep]) -> Result<BTreeMap<TermKey, u64>> {
    let mut fresh = FactLedger::new();
    for (i, step) in log.iter().enumerate() {
        match &step.detail {
            StepDetail::Note => {}
            StepDetail::Value { term, value } => {
                fresh.set_value(*term, *value, &step.citation)?;
            }
            StepDetail::Equal { a, b } => {
                fresh.union(*a, *b, &step.citation)?;
            }
            StepDetail::Bound { term, by, upper } => {
                if fresh.value_key(*by) != Some(*upper) {
                    return Err(Error::DerivationFailed(format!("step {i}: bound source {by} not established")));
                }
                fresh.tighten(*term, *upper)?;
            }
            StepDetail::Solve { run, target, value } => {
                let (first, last) = (run[0], run[run.len() - 1]);
                if fresh.value_key(first) != Some(0) || fresh.value_key(last) != Some(0) {
                    return Err(Error::DerivationFailed(format!("step {i}: flanks of the run are not known zeros")));
                }
                let target_class = fresh.class(*target);
                let mut known: i128 = 0;
                let mut coef: i128 = 0;
                for (j, &k) in run[1..run.len() - 1].iter().enumerate() {
                    let sign: i128 = if j % 2 == 0 { 1 } else { -1 };
                    let c = fresh.class(k);
                    if c == target_class {
                        coef += sign;
                    } else {
                        match fresh.value_key(k) {
                            Some(v) => known += sign * v as i128,
                            None => {
                                return Err(Error::DerivationFailed(format!(
                                    "step {i}: {k} is not established when solving {target}"
                                )))
                            }
                        }
                    }
                }
                if coef == 0 || -known % coef != 0 || -known / coef != *value as i128 {
                    return Err(Error::DerivationFailed(format!(
                        "step {i}: {target} does not replay to {value}"
                    )));
                }
                fresh.set_value(*target, *value, &step.citation)?;
            }
        }
    }
    Ok(fresh.assignment())
}

/// Check every fully known run between zeros sums to zero and no value
/// exceeds a recorded bound.
pub fn audit(ledger: &FactLedger, instances: &[LesInstance]) -> Result<()> {
    for inst in instances {
        let terms = &inst.terms;
        let zeros: Vec<usize> = (0..terms.len()).filter(|&i| ledger.value(terms[i]) == Some(0)).collect();
        for w in zeros.windows(2) {
            let run = &terms[w[0] + 1..w[1]];
            let values: Option<Vec<u64>> = run.iter().map(|&t| ledger.value(t)).collect();
            if let Some(values) = values {
                let sum: i128 = values
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| if i % 2 == 0 { v as i128 } else { -(v as i128) })
                    .sum();
                if sum != 0 {
                    return Err(Error::Inconsistent(format!("audit: run in {} sums to {sum}", inst.label)));
                }
            }
        }
        for &t in terms {
            if let (Some(v), Some(u)) = (ledger.value(t), ledger.upper_bound(t)) {
                if v > u {
                    return Err(Error::Inconsistent(format!("audit: {t} = {v} above bound {u}")));
                }
            }
        }
    }
    Ok(())
}

/// `Z` homology from the reduced poset with the default slot cap: zero
/// above its dimension, zero when it has a cone point, else its Betti
/// numbers. Results are cached per width.
pub struct ZfnSource {
    sig: ColourSignature,
    p_cap: usize,
    cache: BTreeMap<i64, ZInfo>,
}

#[derive(Debug, Clone)]
struct ZInfo {
    dim: i64,
    cone: Option<String>,
    betti: Option<crate::homology::BettiVector>,
}

impl ZfnSource {
    pub fn new(sig: &ColourSignature) -> Self {
        Self {
            sig: sig.clone(),
            p_cap: zfn::default_p_cap(sig),
            cache: BTreeMap::new(),
        }
    }

    fn info(&mut self, delta: i64) -> Result<&mut ZInfo> {
        if !self.cache.contains_key(&delta) {
            let z = zfn::build_zfn_poset(&self.sig, self.p_cap, delta.max(0) as u64)?;
            let info = ZInfo {
                dim: z.poset.longest_chain(),
                cone: z.poset.cone_point().map(|c| z.poset.element(c).to_string()),
                betti: None,
            };
            self.cache.insert(delta, info);
        }
        Ok(self.cache.get_mut(&delta).expect("just inserted"))
    }
}

impl ZSource for ZfnSource {
    fn z_homology(&mut self, delta: i64, degree: u32) -> Result<Option<(u64, String)>> {
        if delta < 1 {
            return Err(Error::InvalidArgument(format!("Z term with width {delta} is empty")));
        }
        let (sig, p_cap) = (self.sig.clone(), self.p_cap);
        let info = self.info(delta)?;
        if degree as i64 > info.dim {
            return Ok(Some((0, format!("zfn dimension {} < {degree} (delta {delta})", info.dim))));
        }
        if let Some(cone) = &info.cone {
            return Ok(Some((0, format!("zfn cone point {cone} (delta {delta})"))));
        }
        if info.betti.is_none() {
            info.betti = Some(zfn::zfn_betti(&sig, p_cap, delta as u64)?);
        }
        let b = info.betti.as_ref().expect("computed").get(degree as usize);
        Ok(Some((b, format!("zfn Betti number (delta {delta})"))))
    }
}

/// Result of a group-homology derivation.
#[derive(Debug, Clone, Serialize)]
pub struct Derivation {
    pub signature: ColourSignature,
    /// `dim H_k(G; Q)` (unreduced) per degree.
    pub table: BTreeMap<u32, u64>,
    /// Degrees whose value was injected rather than derived.
    pub injected: BTreeMap<u32, String>,
    /// Side condition on the symbolic base.
    pub p_min: String,
    pub instances: usize,
    pub log: Vec<ProofStep>,
}

fn p_min(sig: &ColourSignature) -> String {
    let c = sig.derived_constants();
    let two_s = num_bigint::BigUint::from(1u32) << sig.s();
    format!("p >= {}", two_s.max(c.vanish_threshold))
}

fn t_of(sig: &ColourSignature) -> Result<i64> {
    sig.derived_constants()
        .t_u64()
        .and_then(|t| i64::try_from(t).ok())
        .ok_or_else(|| Error::InvalidArgument("t = N - 1 does not fit in 64 bits".into()))
}

/// The instances used for `H_*` of the two-colour, arity-two group: for each
/// target degree `k`, `q = p + 3k` and the pair sequences for
/// `j = 3k-1, ..., 0`, each covering degrees up to `k + 1`.
pub fn instances_2v(max_degree: u32) -> Vec<LesInstance> {
    let mut out = Vec::new();
    for k in 2..=max_degree as i64 {
        let hi = 3 * k;
        for j in (0..hi).rev() {
            out.push(LesInstance::pair(j, hi, k as u32 + 1));
        }
    }
    out
}

/// `H_k(G; Q)` for `k = 0..=8` where `G` has two colours of arity two.
pub fn derive_2v() -> Result<Derivation> {
    derive_2v_with_order(&instances_2v(8))
}

/// As [`derive_2v`] but with a caller-supplied instance order.
pub fn derive_2v_with_order(instances: &[LesInstance]) -> Result<Derivation> {
    const MAX_DEGREE: u32 = 8;
    let sig = ColourSignature::new(vec![2, 2])?;
    let t = t_of(&sig)?;
    let mut ledger = FactLedger::new();
    ledger.inject_fact(HomTerm::group(0), 0, CITE_REDUCED)?;
    ledger.inject_fact(HomTerm::group(1), 0, CITE_SIMPLE)?;
    for k in 1..=MAX_DEGREE {
        ledger.inject_equal(HomTerm::group(k), HomTerm::y(0, t * k as i64, k), CITE_STABILITY)?;
    }
    let mut source = ZfnSource::new(&sig);
    saturate(
        &mut ledger,
        instances,
        Axioms {
            z_source: Some(&mut source),
            ..Axioms::default()
        },
    )?;
    audit(&ledger, instances)?;
    let mut table = BTreeMap::new();
    let mut blocking = BTreeSet::new();
    for k in 0..=MAX_DEGREE {
        match ledger.value(HomTerm::group(k)) {
            Some(v) => {
                table.insert(k, if k == 0 { v + 1 } else { v });
            }
            None => {
                blocking.insert(HomTerm::group(k).to_string());
            }
        }
    }
    if !blocking.is_empty() {
        return Err(Error::Underdetermined {
            goal: "H_*(G) for degrees 0..8".into(),
            blocking: blocking.into_iter().collect(),
        });
    }
    Ok(Derivation {
        p_min: p_min(&sig),
        signature: sig,
        table,
        injected: [(0, CITE_REDUCED.to_string()), (1, CITE_SIMPLE.to_string())].into(),
        instances: instances.len(),
        log: ledger.log,
    })
}

/// Certificate that `H_k(G; Q) = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct VanishingCertificate {
    pub signature: ColourSignature,
    pub k: u32,
    pub value: u64,
    pub p_min: String,
    pub instances: usize,
    pub log: Vec<ProofStep>,
}

/// Windows `H_k(Y_{p+j+1,q}) -> H_k(Y_{p+j,q}) -> H~_{k-1}(Z_{p+j+1,q})`
/// for `q = p + tk` and `j = (t-1)k, ..., 0`.
pub fn instances_vanishing(sig: &ColourSignature, k: u32) -> Result<Vec<LesInstance>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let t = t_of(sig)?;
    let hi = t
        .checked_mul(k as i64)
        .ok_or_else(|| Error::InvalidArgument("t k overflows".into()))?;
    let top = (t - 1) * k as i64;
    Ok((0..=top).rev().map(|j| LesInstance::window(j, hi, k)).collect())
}

/// Descend from the top-dimensional vanishing of `H_k(Y_{p+(t-1)k+1, q})`
/// to `H_k(Y_{p,q}) = H_k(G)`, using `Z` homology from the reduced posets.
pub fn derive_vanishing(sig: &ColourSignature, k: u32) -> Result<VanishingCertificate> {
    let instances = instances_vanishing(sig, k)?;
    let t = t_of(sig)?;
    let mut ledger = FactLedger::new();
    let goal = HomTerm::group(k);
    ledger.inject_equal(goal, HomTerm::y(0, t * k as i64, k), CITE_STABILITY)?;
    let mut source = ZfnSource::new(sig);
    saturate(
        &mut ledger,
        &instances,
        Axioms {
            z_source: Some(&mut source),
            ..Axioms::default()
        },
    )?;
    for inst in &instances {
        let z = inst.terms()[2];
        if let Some(v) = ledger.value(z).filter(|&v| v != 0) {
            return Err(Error::DerivationFailed(format!(
                "{z} = {v} ({}) blocks the descent",
                ledger.citation(z).unwrap_or("?")
            )));
        }
    }
    audit(&ledger, &instances)?;
    match ledger.value(goal) {
        Some(value) => Ok(VanishingCertificate {
            p_min: p_min(sig),
            signature: sig.clone(),
            k,
            value,
            instances: instances.len(),
            log: ledger.log,
        }),
        None => Err(Error::Underdetermined {
            goal: goal.to_string(),
            blocking: ledger.unknowns().iter().map(ToString::to_string).collect(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> HomTerm {
        HomTerm::y(0, 5, 2)
    }

    fn c(dim: u64) -> HomTerm {
        HomTerm::Const { dim }
    }

    fn run(terms: Vec<HomTerm>) -> FactLedger {
        let mut l = FactLedger::new();
        let inst = [LesInstance::custom("test", terms)];
        saturate(
            &mut l,
            &inst,
            Axioms {
                dimension_bound: false,
                point_at_zero_width: false,
                z_source: None,
            },
        )
        .unwrap();
        l
    }

    #[test]
    fn r1_examples() {
        let l = run(vec![HomTerm::Zero, x(), c(1), c(1), HomTerm::Zero]);
        assert_eq!(l.value(x()), Some(0));
        let l = run(vec![HomTerm::Zero, x(), c(1), HomTerm::Zero]);
        assert_eq!(l.value(x()), Some(1));
        let l = run(vec![HomTerm::Zero, x(), c(5), HomTerm::Zero]);
        assert_eq!(l.value(x()), Some(5));
        assert_eq!(l.log().last().unwrap().rule, "R4");
    }

    #[test]
    fn r4_identifies_unknowns() {
        let y = HomTerm::y(0, 7, 1);
        let l = run(vec![HomTerm::Zero, x(), y, HomTerm::Zero]);
        assert_eq!(l.value(x()), None);
        let mut l = l;
        l.inject_fact(y, 3, "given").unwrap();
        assert_eq!(l.value(x()), Some(3));
    }

    #[test]
    fn bounds_recorded() {
        let l = run(vec![HomTerm::Zero, x(), c(2), HomTerm::y(0, 9, 1), c(7)]);
        assert_eq!(l.upper_bound(x()), Some(2));
        let l = run(vec![c(4), x(), HomTerm::Zero]);
        assert_eq!(l.upper_bound(x()), Some(4));
    }

    #[test]
    fn conflicts_are_errors() {
        let mut l = FactLedger::new();
        l.inject_fact(x(), 1, "first").unwrap();
        l.inject_fact(x(), 1, "again").unwrap();
        let err = l.inject_fact(x(), 2, "second").unwrap_err();
        assert!(matches!(err, Error::Conflict { existing: 1, new: 2, .. }));
    }

    #[test]
    fn inconsistent_run_detected() {
        let mut l = FactLedger::new();
        let inst = [LesInstance::custom("bad", vec![HomTerm::Zero, c(1), HomTerm::Zero])];
        assert!(matches!(
            saturate(&mut l, &inst, Axioms::default()),
            Err(Error::Inconsistent(_))
        ));
        let inst = [LesInstance::custom("neg", vec![HomTerm::Zero, x(), c(1), c(3), HomTerm::Zero])];
        assert!(saturate(&mut FactLedger::new(), &inst, Axioms::default()).is_err());
    }

    #[test]
    fn width_translation_keys() {
        assert_eq!(HomTerm::y(3, 6, 2).key(), HomTerm::y(0, 3, 2).key());
        assert_eq!(HomTerm::z(4, 6, 1).key(), TermKey::Z { delta: 3, degree: 1 });
        assert_eq!(HomTerm::y(3, 6, 2).to_string(), "H~_2(Y[p+3,p+6])");
    }

    #[test]
    fn pair_shape() {
        let inst = LesInstance::pair(3, 6, 1);
        let names: Vec<String> = inst.terms().iter().map(ToString::to_string).collect();
        assert_eq!(
            names,
            vec![
                "H~_1(Z[p+4,p+6])",
                "H~_1(Y[p+4,p+6])",
                "H~_1(Y[p+3,p+6])",
                "H~_0(Z[p+4,p+6])",
                "H~_0(Y[p+4,p+6])",
                "H~_0(Y[p+3,p+6])",
                "0"
            ]
        );
    }

    #[test]
    fn two_colour_table() {
        let d = derive_2v().unwrap();
        let expect: BTreeMap<u32, u64> = [(0, 1), (1, 0), (2, 0), (3, 1), (4, 0), (5, 0), (6, 0), (7, 0), (8, 0)].into();
        assert_eq!(d.table, expect);
        assert_eq!(replay(&d.log).unwrap().get(&TermKey::Group(3)), Some(&1));
    }

    #[test]
    fn vanishing_small() {
        let one = ColourSignature::new(vec![2]).unwrap();
        assert_eq!(derive_vanishing(&one, 1).unwrap().value, 0);
        let two = ColourSignature::new(vec![2, 2]).unwrap();
        let cert = derive_vanishing(&two, 4).unwrap();
        assert_eq!(cert.value, 0);
        assert_eq!(cert.instances, 9);
        // degree 2 runs into the sphere at delta 3 and cannot be certified
        assert!(matches!(derive_vanishing(&two, 2), Err(Error::DerivationFailed(_))));
    }
}
