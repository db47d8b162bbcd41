//! Geometric model of the full poset for the Brin-Thompson family.
//!
//! For `sV_{n_1..n_s}` a basis element is a box in the unit `s`-cube and
//! colour `i` cuts a box into `n_i` equal slabs along coordinate `i`. An
//! elementary expansion of one element never cuts the same coordinate twice
//! along a path, so each resulting box is, per coordinate, either the whole
//! interval or one of the `n_i` first-level cells. Boxes are stored that way,
//! which makes geometric equality exact.
//!
//! An expansion class of a `p`-element basis is a multiset of `p` slot
//! partitions (the stabiliser of the basis permutes slots freely).

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::{betti_reduced, BettiVector};
use crate::matching::{injective_matching_exists, MatchingStrategy};
use crate::poset::FinitePoset;
use crate::signature::{ColourSet, ColourSignature};
use crate::zfn::{self, FullClass};

/// Element guard for [`build_z_poset`].
pub const MAX_Z_ELEMENTS: usize = 100_000;
/// Guard on the number of slot partitions generated.
pub const MAX_PARTITIONS: usize = 20_000;
/// Slot counts up to this use exhaustive matching.
pub const EXHAUSTIVE_SLOTS: usize = 8;

/// One box: per coordinate, `None` for the whole interval or `Some(c)` for
/// cell `c` of that coordinate's subdivision.
pub type CubeBox = Vec<Option<u32>>;

fn box_contains(outer: &CubeBox, inner: &CubeBox) -> bool {
    outer.iter().zip(inner).all(|(o, i)| o.is_none() || o == i)
}

/// A partition of the cube reachable by colour splits without repeating a
/// colour along any path. Boxes are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotPartition {
    boxes: Vec<CubeBox>,
}

impl SlotPartition {
    pub fn trivial(s: usize) -> Self {
        Self {
            boxes: vec![vec![None; s]],
        }
    }

    pub fn boxes(&self) -> &[CubeBox] {
        &self.boxes
    }

    /// Leaves gained over the trivial partition.
    pub fn cost(&self) -> u64 {
        self.boxes.len() as u64 - 1
    }

    pub fn is_trivial(&self) -> bool {
        self.boxes.len() == 1
    }

    /// If every box is cut along the same coordinates, that coordinate set.
    /// Such a partition is the full grid over those colours.
    pub fn grid_colours(&self) -> Option<ColourSet> {
        let cut = |b: &CubeBox| {
            b.iter()
                .enumerate()
                .filter(|(_, c)| c.is_some())
                .fold(0u32, |acc, (i, _)| acc | 1 << i)
        };
        let first = cut(&self.boxes[0]);
        self.boxes
            .iter()
            .all(|b| cut(b) == first)
            .then_some(ColourSet::from_bits(first))
    }

    fn split(&self, which: usize, colour: usize, arity: u64) -> Self {
        let mut boxes = self.boxes.clone();
        let target = boxes.swap_remove(which);
        for cell in 0..arity as u32 {
            let mut b = target.clone();
            b[colour] = Some(cell);
            boxes.push(b);
        }
        boxes.sort();
        Self { boxes }
    }
}

impl fmt::Display for SlotPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .boxes
            .iter()
            .map(|b| {
                let coords: Vec<String> = b
                    .iter()
                    .map(|c| c.map_or_else(|| "*".to_string(), |x| x.to_string()))
                    .collect();
                format!("({})", coords.join(","))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(""))
    }
}

/// `b` is obtained from `a` by further cutting: every box of `b` lies in a
/// box of `a` (equivalently every box of `a` is a union of boxes of `b`).
pub fn slot_refines(a: &SlotPartition, b: &SlotPartition) -> bool {
    b.boxes
        .iter()
        .all(|inner| a.boxes.iter().any(|outer| box_contains(outer, inner)))
}

/// Every elementary slot partition with cost at most `max_cost`, ordered by
/// (cost, boxes). The trivial partition comes first.
pub fn enumerate_slot_partitions(sig: &ColourSignature, max_cost: u64) -> Result<Vec<SlotPartition>> {
    let s = sig.s();
    let mut seen: BTreeSet<SlotPartition> = BTreeSet::new();
    let mut frontier = vec![SlotPartition::trivial(s)];
    seen.insert(frontier[0].clone());
    while let Some(part) = frontier.pop() {
        for (which, b) in part.boxes.iter().enumerate() {
            for colour in 0..s {
                if b[colour].is_some() {
                    continue;
                }
                let arity = sig.arities()[colour];
                if part.cost() + arity - 1 > max_cost {
                    continue;
                }
                let next = part.split(which, colour, arity);
                if seen.insert(next.clone()) {
                    if seen.len() > MAX_PARTITIONS {
                        return Err(Error::Resource {
                            what: "slot partitions",
                            actual: seen.len() as u128,
                            limit: MAX_PARTITIONS as u128,
                        });
                    }
                    frontier.push(next);
                }
            }
        }
    }
    let mut all: Vec<SlotPartition> = seen.into_iter().collect();
    all.sort_by(|x, y| (x.cost(), x).cmp(&(y.cost(), y)));
    Ok(all)
}

/// A multiset of `p` slot partitions, at least one nontrivial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExpansionClass {
    /// Indices into the partition list, nondecreasing.
    pub ids: Vec<usize>,
    pub slots: Vec<SlotPartition>,
    pub cost: u64,
}

impl ExpansionClass {
    /// Leaves of the expanded basis.
    pub fn leaf_count(&self) -> u64 {
        self.slots.len() as u64 + self.cost
    }

    pub fn nontrivial(&self) -> impl Iterator<Item = &SlotPartition> {
        self.slots.iter().filter(|s| !s.is_trivial())
    }

    /// Every nontrivial slot is a full grid.
    pub fn is_full(&self) -> bool {
        self.nontrivial().all(|s| s.grid_colours().is_some())
    }

    /// Full, with no grid repeated.
    pub fn is_full_nonrepeating(&self) -> bool {
        let grids: Option<Vec<ColourSet>> = self.nontrivial().map(SlotPartition::grid_colours).collect();
        grids.is_some_and(|g| g.iter().collect::<BTreeSet<_>>().len() == g.len())
    }

    /// The corresponding full class, for full classes.
    pub fn to_full_class(&self, sig: &ColourSignature) -> Option<FullClass> {
        let grids: Option<Vec<ColourSet>> = self.nontrivial().map(SlotPartition::grid_colours).collect();
        FullClass::new(sig, grids?).ok()
    }
}

impl fmt::Display for ExpansionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.slots.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// The poset together with its partition table.
#[derive(Debug, Clone)]
pub struct ZPoset {
    pub sig: ColourSignature,
    pub p: usize,
    pub delta: u64,
    pub partitions: Vec<SlotPartition>,
    pub poset: FinitePoset<ExpansionClass>,
}

/// Expansion classes of a `p`-element basis adding between 1 and `delta`
/// leaves, ordered by slot-wise refinement up to permuting slots.
pub fn build_z_poset(sig: &ColourSignature, p: usize, delta: u64) -> Result<ZPoset> {
    build_z_poset_with_limit(sig, p, delta, MAX_Z_ELEMENTS)
}

pub fn build_z_poset_with_limit(sig: &ColourSignature, p: usize, delta: u64, max_elements: usize) -> Result<ZPoset> {
    if p == 0 {
        return Err(Error::InvalidArgument("p must be at least 1".into()));
    }
    let partitions = enumerate_slot_partitions(sig, delta)?;
    let mut multisets = Vec::new();
    let mut current = Vec::new();
    collect_multisets(&partitions, 1, delta, p, max_elements, &mut current, &mut multisets)?;
    let mut classes: Vec<ExpansionClass> = multisets
        .into_iter()
        .map(|nontrivial| {
            let mut ids = vec![0usize; p - nontrivial.len()];
            ids.extend(nontrivial);
            let cost = ids.iter().map(|&i| partitions[i].cost()).sum();
            ExpansionClass {
                slots: ids.iter().map(|&i| partitions[i].clone()).collect(),
                ids,
                cost,
            }
        })
        .collect();
    classes.sort_by(|x, y| (x.cost, &x.ids).cmp(&(y.cost, &y.ids)));
    let n = partitions.len();
    let refines: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| slot_refines(&partitions[i], &partitions[j])).collect())
        .collect();
    let strategy = if p <= EXHAUSTIVE_SLOTS {
        MatchingStrategy::Exhaustive
    } else {
        MatchingStrategy::Augmenting
    };
    let poset = FinitePoset::from_fn(classes, |a, b| class_leq(&refines, a, b, strategy))?;
    Ok(ZPoset {
        sig: sig.clone(),
        p,
        delta,
        partitions,
        poset,
    })
}

fn class_leq(refines: &[Vec<bool>], a: &ExpansionClass, b: &ExpansionClass, strategy: MatchingStrategy) -> bool {
    a.cost <= b.cost
        && injective_matching_exists(a.ids.len(), b.ids.len(), |i, j| refines[a.ids[i]][b.ids[j]], strategy)
}

/// Cross-check of the slot order against the other decision procedure.
pub fn class_leq_with(z: &ZPoset, a: usize, b: usize, strategy: MatchingStrategy) -> bool {
    let (x, y) = (z.poset.element(a), z.poset.element(b));
    injective_matching_exists(
        x.slots.len(),
        y.slots.len(),
        |i, j| slot_refines(&x.slots[i], &y.slots[j]),
        strategy,
    )
}

fn collect_multisets(
    partitions: &[SlotPartition],
    start: usize,
    budget: u64,
    slots: usize,
    limit: usize,
    current: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) -> Result<()> {
    if slots == 0 {
        return Ok(());
    }
    for i in start..partitions.len() {
        let c = partitions[i].cost();
        if c > budget {
            // sorted by cost
            break;
        }
        current.push(i);
        found.push(current.clone());
        if found.len() > limit {
            return Err(Error::Resource {
                what: "expansion classes",
                actual: found.len() as u128,
                limit: limit as u128,
            });
        }
        collect_multisets(partitions, i, budget - c, slots - 1, limit, current, found)?;
        current.pop();
    }
    Ok(())
}

/// Keep the classes whose nontrivial slots are all full grids.
pub fn filter_full(z: &FinitePoset<ExpansionClass>) -> FinitePoset<ExpansionClass> {
    z.filter(|_, c| c.is_full())
}

/// Keep full classes with no repeated grid.
pub fn filter_full_nonrepeating(z: &FinitePoset<ExpansionClass>) -> FinitePoset<ExpansionClass> {
    z.filter(|_, c| c.is_full_nonrepeating())
}

#[derive(Debug, Clone, Serialize)]
pub struct QuillenStage {
    pub name: &'static str,
    pub elements: usize,
    pub betti: BettiVector,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuillenReport {
    pub signature: ColourSignature,
    pub p: usize,
    pub delta: u64,
    pub stages: Vec<QuillenStage>,
    pub consistent: bool,
    pub first_mismatch: Option<String>,
}

/// Reduced Betti numbers of the full poset, its full and full
/// non-repeating subposets, and the abstract reduced poset with `p_cap = p`.
pub fn cross_validate_quillen(sig: &ColourSignature, p: usize, delta: u64) -> Result<QuillenReport> {
    let z = build_z_poset(sig, p, delta)?;
    let full = filter_full(&z.poset);
    let fn_geo = filter_full_nonrepeating(&z.poset);
    let fn_abstract = zfn::build_zfn_poset(sig, p, delta)?;
    let stage = |name, elements, complex: crate::poset::OrderComplex| QuillenStage {
        name,
        elements,
        betti: betti_reduced(&complex),
    };
    let stages = vec![
        stage("z", z.poset.len(), z.poset.order_complex()?),
        stage("z_full", full.len(), full.order_complex()?),
        stage("z_full_nonrepeating", fn_geo.len(), fn_geo.order_complex()?),
        stage("zfn", fn_abstract.poset.len(), fn_abstract.poset.order_complex()?),
    ];
    let first_mismatch = stages
        .iter()
        .skip(1)
        .find(|s| !s.betti.same_homology(&stages[0].betti))
        .map(|s| format!("{} differs from {}", s.name, stages[0].name));
    Ok(QuillenReport {
        signature: sig.clone(),
        p,
        delta,
        consistent: first_mismatch.is_none(),
        first_mismatch,
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(a: &[u64]) -> ColourSignature {
        ColourSignature::new(a.to_vec()).unwrap()
    }

    #[test]
    fn partition_counts() {
        assert_eq!(enumerate_slot_partitions(&sig(&[2, 2]), 3).unwrap().len(), 8);
        assert_eq!(enumerate_slot_partitions(&sig(&[2]), 1).unwrap().len(), 2);
        assert_eq!(enumerate_slot_partitions(&sig(&[2, 2]), 0).unwrap().len(), 1);
    }

    #[test]
    fn refinement_examples() {
        let parts = enumerate_slot_partitions(&sig(&[2, 2]), 3).unwrap();
        let trivial = &parts[0];
        assert!(parts.iter().all(|b| slot_refines(trivial, b)));
        let singles: Vec<&SlotPartition> = parts.iter().filter(|p| p.cost() == 1).collect();
        assert!(!slot_refines(singles[0], singles[1]) && !slot_refines(singles[1], singles[0]));
        let grid = parts.iter().find(|p| p.cost() == 3).unwrap();
        assert!(slot_refines(singles[0], grid));
        assert_eq!(grid.grid_colours(), Some(ColourSet::from_colours(&[1, 2]).unwrap()));
        let mixed = parts.iter().find(|p| p.cost() == 2).unwrap();
        assert_eq!(mixed.grid_colours(), None);
    }

    #[test]
    fn two_points() {
        let z = build_z_poset(&sig(&[2, 2]), 1, 1).unwrap();
        assert_eq!(z.poset.len(), 2);
        assert!(!z.poset.leq(0, 1) && !z.poset.leq(1, 0));
    }

    #[test]
    fn pair_of_single_splits_above_both() {
        let z = build_z_poset(&sig(&[2, 2]), 2, 2).unwrap();
        let singles: Vec<usize> = (0..z.poset.len())
            .filter(|&i| z.poset.element(i).cost == 1)
            .collect();
        assert_eq!(singles.len(), 2);
        let both = (0..z.poset.len())
            .find(|&i| {
                let c = z.poset.element(i);
                c.cost == 2 && c.slots.iter().all(|s| s.cost() == 1) && c.ids[0] != c.ids[1]
            })
            .unwrap();
        assert!(singles.iter().all(|&s| z.poset.lt(s, both)));
    }

    #[test]
    fn one_colour_is_a_chain() {
        let z = build_z_poset(&sig(&[2]), 2, 2).unwrap();
        assert_eq!(z.poset.len(), 2);
        assert!(z.poset.lt(0, 1));
    }

    #[test]
    fn full_filters() {
        let z = build_z_poset(&sig(&[2, 2]), 2, 3).unwrap();
        for c in z.poset.elements() {
            assert_eq!(c.leaf_count(), 2 + c.cost);
            assert!(c.cost >= 1 && c.cost <= 3);
        }
        let full = filter_full(&z.poset);
        assert!(full.elements().iter().all(ExpansionClass::is_full));
        assert!(full.len() < z.poset.len());
        let fnr = filter_full_nonrepeating(&z.poset);
        assert!(fnr.len() < full.len());
    }

    #[test]
    fn quillen_small() {
        let r = cross_validate_quillen(&sig(&[2, 2]), 4, 3).unwrap();
        assert!(r.consistent, "{:?}", r.first_mismatch);
        assert_eq!(r.stages[0].betti.nonzero(), vec![(1, 1)]);
        let r = cross_validate_quillen(&sig(&[2, 2]), 4, 1).unwrap();
        assert!(r.consistent);
        assert_eq!(r.stages[0].betti.nonzero(), vec![(0, 1)]);
    }

    #[test]
    fn quillen_above_the_threshold() {
        let g = sig(&[2, 2]);
        assert!(cross_validate_quillen(&g, 4, 5).unwrap().consistent);
        // {grid, grid} lies in Z^f but not below beta, so the full poset
        // keeps a 3-sphere that the reduced poset (a cone) does not see
        let r = cross_validate_quillen(&g, 4, 6).unwrap();
        assert!(!r.consistent);
        assert_eq!(r.stages[0].betti.nonzero(), vec![(3, 1)]);
        assert_eq!(r.stages[1].betti.nonzero(), vec![(3, 1)]);
        assert!(r.stages[3].betti.is_acyclic());
    }
}
