//! Finite posets, their Hasse diagrams and order complexes.
//!
//! A [`FinitePoset`] stores its elements in a fixed insertion order together
//! with the full reflexive-transitive relation as bitset rows. The insertion
//! order doubles as the global vertex order of the order complex, so
//! boundary signs are reproducible.

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// Upper bound on elements accepted from untrusted poset dumps.
pub const MAX_DUMP_ELEMENTS: usize = 4096;

/// Default cap on the number of simplices materialised for an order complex.
pub const DEFAULT_MAX_SIMPLICES: usize = 5_000_000;

/// First failure found while checking the order axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum OrderViolation {
    Reflexivity { a: usize },
    Antisymmetry { a: usize, b: usize },
    Transitivity { a: usize, b: usize, c: usize },
}

impl fmt::Display for OrderViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            OrderViolation::Reflexivity { a } => write!(f, "{a} is not related to itself"),
            OrderViolation::Antisymmetry { a, b } => {
                write!(f, "{a} <= {b} and {b} <= {a} with {a} != {b}")
            }
            OrderViolation::Transitivity { a, b, c } => {
                write!(f, "{a} <= {b} and {b} <= {c} but not {a} <= {c}")
            }
        }
    }
}

impl std::error::Error for OrderViolation {}

/// Check reflexivity, antisymmetry and transitivity of the relation whose
/// row `i` holds every `j` with `i <= j`. Scans in index order and reports
/// the first violation.
pub fn validate_order(up: &[BitSet]) -> std::result::Result<(), OrderViolation> {
    let n = up.len();
    for a in 0..n {
        if !up[a].get(a) {
            return Err(OrderViolation::Reflexivity { a });
        }
    }
    for a in 0..n {
        for b in up[a].iter().filter(|&b| b > a) {
            if up[b].get(a) {
                return Err(OrderViolation::Antisymmetry { a, b });
            }
        }
    }
    for a in 0..n {
        for b in up[a].iter() {
            if let Some(c) = up[b].first_outside(&up[a]) {
                return Err(OrderViolation::Transitivity { a, b, c });
            }
        }
    }
    Ok(())
}

/// A finite partially ordered set with a materialised order relation.
#[derive(Debug, Clone)]
pub struct FinitePoset<K> {
    elements: Vec<K>,
    up: Vec<BitSet>,
}

impl<K> FinitePoset<K> {
    /// Build from a `leq` predicate, checking the order axioms.
    pub fn from_fn(elements: Vec<K>, leq: impl Fn(&K, &K) -> bool + Sync) -> Result<Self>
    where
        K: Sync,
    {
        let n = elements.len();
        let up: Vec<BitSet> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = BitSet::new(n);
                for j in 0..n {
                    if leq(&elements[i], &elements[j]) {
                        row.set(j);
                    }
                }
                row
            })
            .collect();
        Self::from_rows(elements, up)
    }

    /// Build from an explicit boolean matrix (`matrix[i][j]` means `i <= j`).
    pub fn from_matrix(elements: Vec<K>, matrix: &[Vec<bool>]) -> Result<Self> {
        let n = elements.len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("relation matrix shape does not match element count".into()));
        }
        let up = matrix
            .iter()
            .map(|r| {
                let mut row = BitSet::new(n);
                r.iter().enumerate().filter(|(_, &x)| x).for_each(|(j, _)| row.set(j));
                row
            })
            .collect();
        Self::from_rows(elements, up)
    }

    /// Build from generating pairs `(i, j)` meaning `i < j`; the relation is
    /// the reflexive-transitive closure.
    pub fn from_covers(elements: Vec<K>, covers: &[(usize, usize)]) -> Result<Self> {
        let n = elements.len();
        let mut succ = vec![Vec::new(); n];
        let mut indegree = vec![0usize; n];
        for &(i, j) in covers {
            if i >= n || j >= n {
                return Err(Error::Parse(format!("cover ({i}, {j}) out of range for {n} elements")));
            }
            if i == j {
                return Err(Error::Parse(format!("cover ({i}, {i}) relates an element to itself")));
            }
            succ[i].push(j);
            indegree[j] += 1;
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            topo.push(v);
            for &w in &succ[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if topo.len() < n {
            let (a, b) = find_cycle_pair(&succ, &indegree);
            return Err(OrderViolation::Antisymmetry { a: a.min(b), b: a.max(b) }.into());
        }
        let mut up = vec![BitSet::new(n); n];
        for &v in topo.iter().rev() {
            let mut row = BitSet::new(n);
            row.set(v);
            for &w in &succ[v] {
                row.union_with(&up[w]);
            }
            up[v] = row;
        }
        Self::from_rows(elements, up)
    }

    fn from_rows(elements: Vec<K>, up: Vec<BitSet>) -> Result<Self> {
        validate_order(&up)?;
        Ok(Self { elements, up })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[K] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &K {
        &self.elements[i]
    }

    #[inline]
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.up[i].get(j)
    }

    #[inline]
    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.up[i].get(j)
    }

    /// Relation rows (`row i` = up-set of `i`).
    pub fn relation(&self) -> &[BitSet] {
        &self.up
    }

    /// Covering pairs `(i, j)`: `i < j` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            let strict: Vec<usize> = self.up[i].iter().filter(|&j| j != i).collect();
            for &j in &strict {
                let between = strict.iter().any(|&k| k != j && self.up[k].get(j));
                if !between {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// A linear extension: indices sorted by down-set size, ties by index.
    pub fn linear_extension(&self) -> Vec<usize> {
        let n = self.len();
        let mut below = vec![0usize; n];
        for row in &self.up {
            for j in row.iter() {
                below[j] += 1;
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (below[i], i));
        order
    }

    /// Number of strict inequalities in a longest chain; `-1` for the empty
    /// poset. Computed as a longest path through the Hasse diagram.
    pub fn longest_chain(&self) -> i64 {
        if self.is_empty() {
            return -1;
        }
        let n = self.len();
        let mut succ = vec![Vec::new(); n];
        for (i, j) in self.covers() {
            succ[i].push(j);
        }
        let mut height = vec![0i64; n];
        for &v in self.linear_extension().iter().rev() {
            height[v] = succ[v].iter().map(|&w| height[w] + 1).max().unwrap_or(0);
        }
        height.into_iter().max().unwrap_or(0)
    }

    /// Maximum element if there is one.
    pub fn maximum(&self) -> Option<usize> {
        (0..self.len()).find(|&m| (0..self.len()).all(|i| self.leq(i, m)))
    }

    /// Minimum element if there is one.
    pub fn minimum(&self) -> Option<usize> {
        (0..self.len()).find(|&m| self.up[m].count() == self.len())
    }

    /// A maximum, else a minimum. Either one makes the order complex a cone.
    pub fn cone_point(&self) -> Option<usize> {
        self.maximum().or_else(|| self.minimum())
    }

    /// Induced subposet on the kept elements, preserving relative order.
    pub fn filter(&self, keep: impl Fn(usize, &K) -> bool) -> FinitePoset<K>
    where
        K: Clone,
    {
        let kept: Vec<usize> = (0..self.len()).filter(|&i| keep(i, &self.elements[i])).collect();
        self.induced(&kept)
    }

    /// Induced subposet on `indices`, in the given order.
    pub fn induced(&self, indices: &[usize]) -> FinitePoset<K>
    where
        K: Clone,
    {
        let m = indices.len();
        let up = indices
            .iter()
            .map(|&i| {
                let mut row = BitSet::new(m);
                for (new_j, &j) in indices.iter().enumerate() {
                    if self.up[i].get(j) {
                        row.set(new_j);
                    }
                }
                row
            })
            .collect();
        FinitePoset {
            elements: indices.iter().map(|&i| self.elements[i].clone()).collect(),
            up,
        }
    }

    /// Same poset with elements reordered: new position `k` holds old element `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> FinitePoset<K>
    where
        K: Clone,
    {
        assert_eq!(perm.len(), self.len(), "permutation length");
        self.induced(perm)
    }

    pub fn map<L>(self, f: impl FnMut(K) -> L) -> FinitePoset<L> {
        FinitePoset {
            elements: self.elements.into_iter().map(f).collect(),
            up: self.up,
        }
    }

    /// Number of chains (nonempty totally ordered subsets), saturating.
    pub fn chain_count(&self) -> u128 {
        let n = self.len();
        let mut starting_at = vec![0u128; n];
        for &v in self.linear_extension().iter().rev() {
            let above: u128 = self.up[v]
                .iter()
                .filter(|&w| w != v)
                .fold(0u128, |acc, w| acc.saturating_add(starting_at[w]));
            starting_at[v] = above.saturating_add(1);
        }
        starting_at.into_iter().fold(0u128, u128::saturating_add)
    }

    /// The order complex, refusing to build more than `max_simplices` simplices.
    pub fn order_complex_bounded(&self, max_simplices: usize) -> Result<OrderComplex>
    where
        K: Sync,
    {
        let count = self.chain_count();
        if count > max_simplices as u128 {
            return Err(Error::Resource {
                what: "order complex simplices",
                actual: count,
                limit: max_simplices as u128,
            });
        }
        let n = self.len();
        let strict_up: Vec<Vec<u32>> = (0..n)
            .map(|i| self.up[i].iter().filter(|&j| j != i).map(|j| j as u32).collect())
            .collect();
        let per_start: Vec<Vec<Vec<u32>>> = (0..n as u32)
            .into_par_iter()
            .map(|start| {
                let mut found = Vec::new();
                let mut chain = vec![start];
                extend_chains(&strict_up, &mut chain, &mut found);
                found
            })
            .collect();
        let mut by_dim: Vec<Vec<Vec<u32>>> = Vec::new();
        for chains in per_start {
            for mut chain in chains {
                chain.sort_unstable();
                let d = chain.len() - 1;
                if by_dim.len() <= d {
                    by_dim.resize_with(d + 1, Vec::new);
                }
                by_dim[d].push(chain);
            }
        }
        let layers = by_dim
            .into_iter()
            .enumerate()
            .map(|(d, mut list)| {
                list.sort_unstable();
                SimplexLayer::from_sorted(d + 1, list)
            })
            .collect();
        Ok(OrderComplex {
            vertex_count: n,
            layers,
        })
    }

    pub fn order_complex(&self) -> Result<OrderComplex>
    where
        K: Sync,
    {
        self.order_complex_bounded(DEFAULT_MAX_SIMPLICES)
    }

    /// Export as `{"elements":[...],"covers":[[i,j],...]}`.
    pub fn to_dump(&self) -> PosetDump
    where
        K: fmt::Display,
    {
        PosetDump {
            elements: self
                .elements
                .iter()
                .map(|k| serde_json::Value::String(k.to_string()))
                .collect(),
            covers: self.covers().into_iter().map(|(i, j)| [i, j]).collect(),
        }
    }
}

fn extend_chains(strict_up: &[Vec<u32>], chain: &mut Vec<u32>, found: &mut Vec<Vec<u32>>) {
    found.push(chain.clone());
    let last = *chain.last().expect("chain is nonempty") as usize;
    for &next in &strict_up[last] {
        chain.push(next);
        extend_chains(strict_up, chain, found);
        chain.pop();
    }
}

fn find_cycle_pair(succ: &[Vec<usize>], indegree: &[usize]) -> (usize, usize) {
    // Nodes left with positive indegree after Kahn's algorithm all lie on or
    // downstream of a cycle; walking predecessors-with-remaining-indegree
    // from any of them must revisit a node.
    let n = succ.len();
    let mut pred = vec![Vec::new(); n];
    for (i, out) in succ.iter().enumerate() {
        for &j in out {
            if indegree[i] > 0 && indegree[j] > 0 {
                pred[j].push(i);
            }
        }
    }
    let start = (0..n).find(|&i| indegree[i] > 0).expect("cycle exists");
    let mut seen = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut v = start;
    loop {
        if seen[v] != usize::MAX {
            let cyc = &path[seen[v]..];
            return (cyc[0], cyc[cyc.len() - 1]);
        }
        seen[v] = path.len();
        path.push(v);
        v = pred[v][0];
    }
}

/// Serialised poset: element keys plus covering pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetDump {
    pub elements: Vec<serde_json::Value>,
    pub covers: Vec<[usize; 2]>,
}

impl PosetDump {
    pub fn parse(text: &str) -> Result<FinitePoset<serde_json::Value>> {
        let dump: PosetDump = serde_json::from_str(text)?;
        dump.into_poset()
    }

    pub fn into_poset(self) -> Result<FinitePoset<serde_json::Value>> {
        if self.elements.len() > MAX_DUMP_ELEMENTS {
            return Err(Error::Resource {
                what: "poset dump elements",
                actual: self.elements.len() as u128,
                limit: MAX_DUMP_ELEMENTS as u128,
            });
        }
        let covers: Vec<(usize, usize)> = self.covers.iter().map(|c| (c[0], c[1])).collect();
        FinitePoset::from_covers(self.elements, &covers)
    }
}

/// Simplices of one dimension, each a strictly increasing vertex list,
/// stored flat and sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexLayer {
    width: usize,
    data: Vec<u32>,
}

impl SimplexLayer {
    fn from_sorted(width: usize, list: Vec<Vec<u32>>) -> Self {
        let mut data = Vec::with_capacity(width * list.len());
        for s in list {
            data.extend_from_slice(&s);
        }
        Self { width, data }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks_exact(self.width)
    }

    /// Index of `simplex` in this layer.
    pub fn position(&self, simplex: &[u32]) -> Option<usize> {
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(simplex) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

/// A finite simplicial complex whose simplices are listed per dimension with
/// vertices in the global vertex order. For an order complex the simplices
/// are exactly the chains of the poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderComplex {
    vertex_count: usize,
    layers: Vec<SimplexLayer>,
}

impl OrderComplex {
    pub fn empty() -> Self {
        Self {
            vertex_count: 0,
            layers: Vec::new(),
        }
    }

    /// Dimension of the complex, `-1` when empty.
    pub fn dim(&self) -> i64 {
        self.layers.len() as i64 - 1
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// Number of poset elements the vertex indices refer to.
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn layer(&self, d: usize) -> Option<&SimplexLayer> {
        self.layers.get(d)
    }

    pub fn layers(&self) -> &[SimplexLayer] {
        &self.layers
    }

    /// `f_d` for `d = 0..=dim`.
    pub fn face_counts(&self) -> Vec<usize> {
        self.layers.iter().map(SimplexLayer::len).collect()
    }

    pub fn simplex_count(&self) -> usize {
        self.face_counts().iter().sum()
    }

    /// Unreduced Euler characteristic.
    pub fn euler_characteristic(&self) -> i64 {
        self.face_counts()
            .iter()
            .enumerate()
            .map(|(d, &f)| if d % 2 == 0 { f as i64 } else { -(f as i64) })
            .sum()
    }

    /// Every `d`-simplex has all of its `d + 1` facets present.
    pub fn is_closed_under_faces(&self) -> bool {
        self.layers.iter().enumerate().skip(1).all(|(d, layer)| {
            let below = &self.layers[d - 1];
            layer.iter().all(|s| {
                (0..s.len()).all(|skip| {
                    let face: Vec<u32> = s.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &v)| v).collect();
                    below.position(&face).is_some()
                })
            })
        })
    }

    pub fn to_dump(&self) -> ComplexDump {
        ComplexDump {
            dim: self.dim(),
            simplices: self
                .layers
                .iter()
                .flat_map(|l| l.iter().map(<[u32]>::to_vec))
                .collect(),
        }
    }
}

/// Serialised complex: `{"dim":d,"simplices":[[v...],...]}` listing every
/// simplex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDump {
    pub dim: i64,
    pub simplices: Vec<Vec<u32>>,
}

/// Cap on simplices accepted from a dump.
pub const MAX_DUMP_SIMPLICES: usize = 1_000_000;
/// Cap on simplex dimension accepted from a dump.
pub const MAX_DUMP_DIM: usize = 64;

impl ComplexDump {
    pub fn parse(text: &str) -> Result<OrderComplex> {
        let dump: ComplexDump = serde_json::from_str(text)?;
        dump.into_complex()
    }

    /// Validate and normalise. Vertex lists are sorted; duplicates within a
    /// simplex, missing faces, or a `dim` that disagrees with the data are
    /// rejected.
    pub fn into_complex(self) -> Result<OrderComplex> {
        if self.simplices.len() > MAX_DUMP_SIMPLICES {
            return Err(Error::Resource {
                what: "complex dump simplices",
                actual: self.simplices.len() as u128,
                limit: MAX_DUMP_SIMPLICES as u128,
            });
        }
        let mut by_dim: Vec<Vec<Vec<u32>>> = Vec::new();
        let mut max_vertex: Option<u32> = None;
        for mut s in self.simplices {
            if s.is_empty() {
                return Err(Error::Parse("empty simplex".into()));
            }
            if s.len() > MAX_DUMP_DIM + 1 {
                return Err(Error::Resource {
                    what: "simplex dimension",
                    actual: (s.len() - 1) as u128,
                    limit: MAX_DUMP_DIM as u128,
                });
            }
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Parse(format!("repeated vertex in simplex {s:?}")));
            }
            max_vertex = max_vertex.max(s.last().copied());
            let d = s.len() - 1;
            if by_dim.len() <= d {
                by_dim.resize_with(d + 1, Vec::new);
            }
            by_dim[d].push(s);
        }
        let layers: Vec<SimplexLayer> = by_dim
            .into_iter()
            .enumerate()
            .map(|(d, mut list)| {
                list.sort_unstable();
                list.dedup();
                SimplexLayer::from_sorted(d + 1, list)
            })
            .collect();
        if layers.iter().any(SimplexLayer::is_empty) {
            return Err(Error::Parse("complex skips a dimension".into()));
        }
        let complex = OrderComplex {
            vertex_count: max_vertex.map_or(0, |v| v as usize + 1),
            layers,
        };
        if complex.dim() != self.dim {
            return Err(Error::Parse(format!(
                "declared dim {} but simplices give {}",
                self.dim,
                complex.dim()
            )));
        }
        if !complex.is_closed_under_faces() {
            return Err(Error::Parse("complex is not closed under taking faces".into()));
        }
        Ok(complex)
    }
}
