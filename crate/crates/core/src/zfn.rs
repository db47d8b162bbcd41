//! The reduced poset of full, non-repeating expansion classes.
//!
//! An element is a set of distinct nonempty colour subsets `Omega`; applying
//! every colour of `Omega` once to one basis element costs `N_Omega - 1`
//! leaves. The poset keeps the classes with at most `p_cap` subsets and
//! total cost at most `delta`, ordered by subset inclusion along an
//! injective assignment.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::{betti_reduced, BettiVector};
use crate::matching::{injective_matching_exists, MatchingStrategy};
use crate::poset::FinitePoset;
use crate::signature::{subset_cost_u64, ColourSet, ColourSignature};

/// Default cap on poset elements built by this module.
pub const DEFAULT_MAX_ELEMENTS: usize = 5000;

/// A set of distinct nonempty colour subsets, kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FullClass {
    omegas: Vec<ColourSet>,
    cost: u64,
}

impl FullClass {
    pub fn new(sig: &ColourSignature, mut omegas: Vec<ColourSet>) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::InvalidArgument("a full class needs at least one subset".into()));
        }
        omegas.sort();
        if omegas.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("repeated colour subset".into()));
        }
        let mut cost = 0u64;
        for &o in &omegas {
            let c = subset_cost_u64(sig, o)?.ok_or_else(|| {
                Error::InvalidArgument(format!("cost of {o} does not fit in 64 bits"))
            })?;
            cost = cost
                .checked_add(c)
                .ok_or_else(|| Error::InvalidArgument("class cost does not fit in 64 bits".into()))?;
        }
        Ok(Self { omegas, cost })
    }

    pub fn omegas(&self) -> &[ColourSet] {
        &self.omegas
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    pub fn size(&self) -> usize {
        self.omegas.len()
    }

    /// Total number of colours across subsets; strictly increases along `<`.
    pub fn weight(&self) -> usize {
        self.omegas.iter().map(|o| o.len()).sum()
    }
}

impl fmt::Display for FullClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.omegas.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// `a <= b`: some injection sends each subset of `a` to a superset in `b`.
pub fn leq_fullclass(a: &FullClass, b: &FullClass) -> bool {
    leq_fullclass_with(a, b, MatchingStrategy::default())
}

pub fn leq_fullclass_with(a: &FullClass, b: &FullClass, strategy: MatchingStrategy) -> bool {
    injective_matching_exists(
        a.size(),
        b.size(),
        |i, j| a.omegas[i].is_subset(b.omegas[j]),
        strategy,
    )
}

/// Smallest cap that admits the class of all nonempty subsets.
pub fn default_p_cap(sig: &ColourSignature) -> usize {
    (1usize << sig.s().min(usize::BITS as usize - 1)) - 1
}

/// The poset together with the parameters it was built from.
#[derive(Debug, Clone)]
pub struct ZfnPoset {
    pub sig: ColourSignature,
    pub p_cap: usize,
    pub delta: u64,
    pub poset: FinitePoset<FullClass>,
}

/// Every full class with at most `p_cap` subsets and cost at most `delta`,
/// listed by (weight, canonical key), which is a linear extension.
pub fn enumerate_full_classes(
    sig: &ColourSignature,
    p_cap: usize,
    delta: u64,
    max_elements: usize,
) -> Result<Vec<FullClass>> {
    let subsets = sig.nonempty_subsets()?;
    let costs: Vec<Option<u64>> = subsets
        .iter()
        .map(|&o| subset_cost_u64(sig, o))
        .collect::<Result<_>>()?;
    let affordable: Vec<(ColourSet, u64)> = subsets
        .into_iter()
        .zip(costs)
        .filter_map(|(o, c)| c.filter(|&c| c <= delta).map(|c| (o, c)))
        .collect();
    let mut found: Vec<Vec<ColourSet>> = Vec::new();
    let mut current = Vec::new();
    collect_classes(&affordable, 0, delta, p_cap, max_elements, &mut current, &mut found)?;
    let mut classes: Vec<FullClass> = found
        .into_iter()
        .map(|omegas| FullClass::new(sig, omegas))
        .collect::<Result<_>>()?;
    classes.sort_by(|x, y| (x.weight(), x).cmp(&(y.weight(), y)));
    Ok(classes)
}

fn collect_classes(
    items: &[(ColourSet, u64)],
    start: usize,
    budget: u64,
    slots: usize,
    limit: usize,
    current: &mut Vec<ColourSet>,
    found: &mut Vec<Vec<ColourSet>>,
) -> Result<()> {
    if slots == 0 {
        return Ok(());
    }
    for i in start..items.len() {
        let (o, c) = items[i];
        if c > budget {
            continue;
        }
        current.push(o);
        found.push(current.clone());
        if found.len() > limit {
            return Err(Error::Resource {
                what: "full classes",
                actual: found.len() as u128,
                limit: limit as u128,
            });
        }
        collect_classes(items, i + 1, budget - c, slots - 1, limit, current, found)?;
        current.pop();
    }
    Ok(())
}

pub fn build_zfn_poset(sig: &ColourSignature, p_cap: usize, delta: u64) -> Result<ZfnPoset> {
    build_zfn_poset_with_limit(sig, p_cap, delta, DEFAULT_MAX_ELEMENTS)
}

/// `delta = 0` yields the empty poset, since every subset costs at least 1.
pub fn build_zfn_poset_with_limit(
    sig: &ColourSignature,
    p_cap: usize,
    delta: u64,
    max_elements: usize,
) -> Result<ZfnPoset> {
    if p_cap == 0 {
        return Err(Error::InvalidArgument("p_cap must be at least 1".into()));
    }
    let classes = enumerate_full_classes(sig, p_cap, delta, max_elements)?;
    let poset = FinitePoset::from_fn(classes, leq_fullclass)?;
    Ok(ZfnPoset {
        sig: sig.clone(),
        p_cap,
        delta,
        poset,
    })
}

pub fn zfn_betti(sig: &ColourSignature, p_cap: usize, delta: u64) -> Result<BettiVector> {
    let z = build_zfn_poset(sig, p_cap, delta)?;
    Ok(betti_reduced(&z.poset.order_complex()?))
}

/// Longest chain length, `-1` for the empty poset.
pub fn zfn_dimension(sig: &ColourSignature, p_cap: usize, delta: u64) -> Result<i64> {
    Ok(build_zfn_poset(sig, p_cap, delta)?.poset.longest_chain())
}

/// Element of the closed interval `[0^, beta]` of the ambient poset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IntervalElement {
    Bottom,
    Class(FullClass),
}

impl fmt::Display for IntervalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalElement::Bottom => f.write_str("0^"),
            IntervalElement::Class(c) => c.fmt(f),
        }
    }
}

/// All full classes plus a bottom element. `beta`, the class of every
/// nonempty subset, is its top.
pub fn ambient_interval(sig: &ColourSignature) -> Result<FinitePoset<IntervalElement>> {
    let classes = enumerate_full_classes(sig, default_p_cap(sig), u64::MAX, DEFAULT_MAX_ELEMENTS)?;
    let elements: Vec<IntervalElement> = std::iter::once(IntervalElement::Bottom)
        .chain(classes.into_iter().map(IntervalElement::Class))
        .collect();
    FinitePoset::from_fn(elements, |a, b| match (a, b) {
        (IntervalElement::Bottom, _) => true,
        (_, IntervalElement::Bottom) => false,
        (IntervalElement::Class(x), IntervalElement::Class(y)) => leq_fullclass(x, y),
    })
}

/// Outcome of the dimension-or-cone test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Dichotomy {
    /// Dimension is below `D(s) - 1`.
    DimBelow { dim: i64 },
    /// Full dimension and a cone point exists.
    Contractible { cone: FullClass },
    /// Full dimension and no cone point.
    Counterexample { dim: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DichotomyReport {
    pub dim: i64,
    pub full_dim: i64,
    pub elements: usize,
    #[serde(flatten)]
    pub verdict: Dichotomy,
}

/// Either the poset has dimension below `D(s) - 1` or it has a cone point.
/// Requires `p_cap >= 2^s - 1`.
pub fn contractibility_dichotomy(sig: &ColourSignature, p_cap: usize, delta: u64) -> Result<DichotomyReport> {
    if p_cap < default_p_cap(sig) {
        return Err(Error::InvalidArgument(format!(
            "p_cap {p_cap} is below 2^s - 1 = {}",
            default_p_cap(sig)
        )));
    }
    let full_dim = sig
        .derived_constants()
        .d_usize()
        .ok_or_else(|| Error::InvalidArgument("D(s) too large".into()))? as i64
        - 1;
    let z = build_zfn_poset(sig, p_cap, delta)?;
    let dim = z.poset.longest_chain();
    let verdict = if dim < full_dim {
        Dichotomy::DimBelow { dim }
    } else if let Some(c) = z.poset.cone_point() {
        Dichotomy::Contractible {
            cone: z.poset.element(c).clone(),
        }
    } else {
        Dichotomy::Counterexample { dim }
    };
    Ok(DichotomyReport {
        dim,
        full_dim,
        elements: z.poset.len(),
        verdict,
    })
}

/// Statistics reported for one `(sig, p_cap, delta)` instance.
#[derive(Debug, Clone, Serialize)]
pub struct ZfnSummary {
    pub signature: ColourSignature,
    pub p_cap: usize,
    pub delta: u64,
    pub elements: usize,
    pub covers: usize,
    pub dimension: i64,
    pub betti: BettiVector,
    pub cone_point: Option<String>,
}

pub fn zfn_summary(sig: &ColourSignature, p_cap: usize, delta: u64) -> Result<ZfnSummary> {
    let z = build_zfn_poset(sig, p_cap, delta)?;
    let betti = betti_reduced(&z.poset.order_complex()?);
    Ok(ZfnSummary {
        signature: sig.clone(),
        p_cap,
        delta,
        elements: z.poset.len(),
        covers: z.poset.covers().len(),
        dimension: z.poset.longest_chain(),
        betti,
        cone_point: z.poset.cone_point().map(|i| z.poset.element(i).to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(a: &[u64]) -> ColourSignature {
        ColourSignature::new(a.to_vec()).unwrap()
    }

    fn class(g: &ColourSignature, sets: &[&[usize]]) -> FullClass {
        FullClass::new(g, sets.iter().map(|s| ColourSet::from_colours(s).unwrap()).collect()).unwrap()
    }

    #[test]
    fn order_examples() {
        let g = sig(&[2, 2]);
        assert!(leq_fullclass(&class(&g, &[&[1]]), &class(&g, &[&[1, 2]])));
        assert!(!leq_fullclass(&class(&g, &[&[1], &[2]]), &class(&g, &[&[1, 2]])));
        assert!(leq_fullclass(&class(&g, &[&[1], &[2]]), &class(&g, &[&[1], &[1, 2]])));
    }

    #[test]
    fn rejects_repeats_and_empties() {
        let g = sig(&[2, 2]);
        let one = ColourSet::from_colours(&[1]).unwrap();
        assert!(FullClass::new(&g, vec![one, one]).is_err());
        assert!(FullClass::new(&g, vec![]).is_err());
        assert!(FullClass::new(&g, vec![ColourSet::EMPTY]).is_err());
    }

    #[test]
    fn small_deltas() {
        let g = sig(&[2, 2]);
        assert!(build_zfn_poset(&g, 4, 0).unwrap().poset.is_empty());
        let z1 = build_zfn_poset(&g, 4, 1).unwrap();
        let names: Vec<String> = z1.poset.elements().iter().map(ToString::to_string).collect();
        assert_eq!(names, vec!["{{1}}", "{{2}}"]);
        assert!(!z1.poset.leq(0, 1) && !z1.poset.leq(1, 0));
        let z3 = build_zfn_poset(&g, 4, 3).unwrap();
        assert_eq!(z3.poset.len(), 4);
        assert_eq!(z3.poset.order_complex().unwrap().face_counts(), vec![4, 4]);
    }

    #[test]
    fn betti_sweep_two_colours() {
        let g = sig(&[2, 2]);
        let nz = |d| zfn_betti(&g, 4, d).unwrap().nonzero();
        assert_eq!(nz(1), vec![(0, 1)]);
        assert_eq!(nz(2), vec![]);
        assert_eq!(nz(3), vec![(1, 1)]);
        assert_eq!(nz(4), vec![(2, 1)]);
        assert_eq!(nz(5), vec![]);
    }

    #[test]
    fn dimensions_and_dichotomy() {
        let g = sig(&[2, 2]);
        assert_eq!(zfn_dimension(&g, 4, 5).unwrap(), 3);
        assert_eq!(zfn_dimension(&g, 4, 1).unwrap(), 0);
        assert_eq!(zfn_dimension(&g, 4, 0).unwrap(), -1);
        let r = contractibility_dichotomy(&g, 4, 4).unwrap();
        assert_eq!(r.verdict, Dichotomy::DimBelow { dim: 2 });
        let r = contractibility_dichotomy(&g, 4, 6).unwrap();
        assert_eq!(
            r.verdict,
            Dichotomy::Contractible {
                cone: class(&g, &[&[1], &[1, 2], &[2]])
            }
        );
        let g23 = sig(&[2, 3]);
        assert!(matches!(
            contractibility_dichotomy(&g23, 4, 9).unwrap().verdict,
            Dichotomy::Contractible { .. }
        ));
        assert!(contractibility_dichotomy(&g, 2, 6).is_err());
    }

    #[test]
    fn ambient_chain_length() {
        assert_eq!(ambient_interval(&sig(&[2, 2])).unwrap().longest_chain(), 4);
        assert_eq!(ambient_interval(&sig(&[3])).unwrap().longest_chain(), 1);
    }

    #[test]
    fn element_guard() {
        let g = sig(&[2, 2, 2]);
        assert!(matches!(
            build_zfn_poset_with_limit(&g, 7, 100, 10),
            Err(Error::Resource { .. })
        ));
    }
}
