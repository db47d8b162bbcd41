//! Injective assignments in bipartite compatibility graphs.
//!
//! Both comparison relations in the crate reduce to "is there an injection
//! from the left items into the right items along compatible pairs". Two
//! independent deciders are kept so they can be cross-checked.

/// Which decision procedure to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchingStrategy {
    /// Backtracking over all injective assignments.
    Exhaustive,
    /// Kuhn's augmenting-path algorithm.
    Augmenting,
    /// Exhaustive while the right side has at most this many items.
    Auto { exhaustive_up_to: usize },
}

/// Default switch-over point for [`MatchingStrategy::Auto`].
pub const EXHAUSTIVE_LIMIT: usize = 6;

impl Default for MatchingStrategy {
    fn default() -> Self {
        MatchingStrategy::Auto {
            exhaustive_up_to: EXHAUSTIVE_LIMIT,
        }
    }
}

/// Does an injective `f: 0..left -> 0..right` exist with `compatible(i, f(i))`?
pub fn injective_matching_exists(
    left: usize,
    right: usize,
    compatible: impl Fn(usize, usize) -> bool,
    strategy: MatchingStrategy,
) -> bool {
    if left > right {
        return false;
    }
    let adj: Vec<Vec<usize>> = (0..left)
        .map(|i| (0..right).filter(|&j| compatible(i, j)).collect())
        .collect();
    if adj.iter().any(Vec::is_empty) {
        return false;
    }
    let exhaustive = match strategy {
        MatchingStrategy::Exhaustive => true,
        MatchingStrategy::Augmenting => false,
        MatchingStrategy::Auto { exhaustive_up_to } => right <= exhaustive_up_to,
    };
    if exhaustive {
        let mut used = vec![false; right];
        backtrack(&adj, 0, &mut used)
    } else {
        maximum_matching(&adj, right) == left
    }
}

fn backtrack(adj: &[Vec<usize>], i: usize, used: &mut [bool]) -> bool {
    if i == adj.len() {
        return true;
    }
    for &j in &adj[i] {
        if !used[j] {
            used[j] = true;
            if backtrack(adj, i + 1, used) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}

/// Size of a maximum matching (Kuhn).
pub fn maximum_matching(adj: &[Vec<usize>], right: usize) -> usize {
    let mut owner: Vec<Option<usize>> = vec![None; right];
    let mut size = 0;
    for i in 0..adj.len() {
        let mut seen = vec![false; right];
        if augment(adj, i, &mut seen, &mut owner) {
            size += 1;
        }
    }
    size
}

fn augment(adj: &[Vec<usize>], i: usize, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
    for &j in &adj[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        if owner[j].is_none_or(|k| augment(adj, k, seen, owner)) {
            owner[j] = Some(i);
            return true;
        }
    }
    false
}
