use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use thompson_homology::conj::{count_closed_general, enumerate_orbit_vectors, satisfies, CountingConvention};
use thompson_homology::fj::{
    centralizer_poincare, fj_summand_indices, fj_total_dimension, CoinvariantMode, PoincarePolynomial,
    ThetaDimsTable,
};
use thompson_homology::homology::{
    boundary_matrices, rank_exact, rank_exact_bigint, rank_modular, RankMethod, SparseMatrix,
};
use thompson_homology::les::{derive_2v, derive_2v_with_order, instances_2v, replay, TermKey};
use thompson_homology::matching::{injective_matching_exists, MatchingStrategy};
use thompson_homology::poset::validate_order;
use thompson_homology::zfn::{enumerate_full_classes, leq_fullclass};
use thompson_homology::{betti_reduced, BettiVector, ColourSignature, FinitePoset};

/// Random poset on `n` points: keep `i < j` pairs where `bits` says so,
/// then close transitively.
fn random_poset(n: usize, bits: &[bool]) -> FinitePoset<usize> {
    let mut m = vec![vec![false; n]; n];
    let mut k = 0;
    for i in 0..n {
        m[i][i] = true;
        for j in i + 1..n {
            m[i][j] = bits[k % bits.len().max(1)];
            k += 1;
        }
    }
    for via in 0..n {
        for i in 0..n {
            for j in 0..n {
                if m[i][via] && m[via][j] {
                    m[i][j] = true;
                }
            }
        }
    }
    FinitePoset::from_matrix((0..n).collect(), &m).unwrap()
}

fn poset_strategy(max: usize) -> impl Strategy<Value = FinitePoset<usize>> {
    (1..=max, prop::collection::vec(any::<bool>(), 1..64)).prop_map(|(n, bits)| random_poset(n, &bits))
}

/// Rank over Q by fraction-free elimination on a dense copy.
fn bareiss_rank(m: &SparseMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = m
        .to_dense()
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for cc in c + 1..cols {
                let v = (&a[rank][c] * &a[r][cc] - &a[r][c] * &a[rank][cc]) / &prev;
                a[r][cc] = v;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].abs();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn oracle_betti(p: &FinitePoset<usize>) -> Vec<u64> {
    let cx = boundary_matrices(&p.order_complex().unwrap(), true);
    let ranks: Vec<usize> = cx.boundaries.iter().map(bareiss_rank).collect();
    let f = cx.face_counts();
    (0..f.len())
        .map(|j| (f[j] - ranks[j] - ranks.get(j + 1).copied().unwrap_or(0)) as u64)
        .collect()
}

fn with_top(p: &FinitePoset<usize>) -> FinitePoset<usize> {
    let n = p.len();
    let mut m: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| p.leq(i, j)).chain([true]).collect()).collect();
    m.push((0..=n).map(|j| j == n).collect());
    FinitePoset::from_matrix((0..=n).collect(), &m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_axioms_hold(p in poset_strategy(10)) {
        prop_assert!(validate_order(p.relation()).is_ok());
        for i in 0..p.len() {
            for j in 0..p.len() {
                prop_assert!(!(p.lt(i, j) && p.lt(j, i)));
            }
        }
    }

    #[test]
    fn boundary_squared_vanishes(p in poset_strategy(8)) {
        let c = p.order_complex().unwrap();
        prop_assert!(boundary_matrices(&c, true).boundary_squared_is_zero());
        prop_assert!(boundary_matrices(&c, false).boundary_squared_is_zero());
        prop_assert!(c.is_closed_under_faces());
    }

    #[test]
    fn euler_identity_and_oracle(p in poset_strategy(7)) {
        let b = betti_reduced(&p.order_complex().unwrap());
        prop_assert!(b.euler_identity_holds());
        let want = oracle_betti(&p);
        for (j, &w) in want.iter().enumerate() {
            prop_assert_eq!(b.get(j), w, "degree {}", j);
        }
    }

    #[test]
    fn cone_is_acyclic(p in poset_strategy(7)) {
        let q = with_top(&p);
        prop_assert!(q.cone_point().is_some());
        prop_assert!(betti_reduced(&q.order_complex().unwrap()).is_acyclic());
    }

    #[test]
    fn vertex_order_invariance(p in poset_strategy(8), seed in any::<u64>()) {
        let b = betti_reduced(&p.order_complex().unwrap());
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..5 {
            let mut perm: Vec<usize> = (0..p.len()).collect();
            perm.shuffle(&mut rng);
            let q = p.permuted(&perm);
            prop_assert!(validate_order(q.relation()).is_ok());
            prop_assert_eq!(&betti_reduced(&q.order_complex().unwrap()), &b);
        }
    }

    #[test]
    fn rank_methods_agree(
        rows in 1usize..9,
        cols in 1usize..9,
        entries in prop::collection::vec(-3i64..=3, 81),
    ) {
        let dense: Vec<Vec<i64>> = (0..rows).map(|r| (0..cols).map(|c| entries[r * 9 + c]).collect()).collect();
        let m = SparseMatrix::from_dense(&dense);
        let want = bareiss_rank(&m);
        prop_assert_eq!(rank_exact(&m), want);
        prop_assert_eq!(rank_exact_bigint(&m), want);
        prop_assert!(rank_modular(&m, 2_147_483_629) <= want);
        prop_assert_eq!(RankMethod::Modular { primes: 3, seed: 1 }.rank(&m), want);
    }

    #[test]
    fn matching_strategies_agree(
        left in 0usize..6,
        right in 0usize..7,
        bits in prop::collection::vec(any::<bool>(), 42),
    ) {
        let compat = |i: usize, j: usize| bits[i * 7 + j];
        let a = injective_matching_exists(left, right, compat, MatchingStrategy::Exhaustive);
        let b = injective_matching_exists(left, right, compat, MatchingStrategy::Augmenting);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn parsers_never_panic(text in ".{0,200}") {
        let _ = thompson_homology::PosetDump::parse(&text);
        let _ = thompson_homology::ComplexDump::parse(&text);
        let _ = ColourSignature::from_json(&text);
        let _ = thompson_homology::signature::parse_arities(&text);
        let _ = thompson_homology::conj::OrbitTypeVector::parse(12, &text);
        let _ = ThetaDimsTable::from_json(&text);
        let _ = thompson_homology::fj::CoinvariantTable::from_json(&text);
    }

    #[test]
    fn enumerated_vectors_satisfy_constraints(n in 2u64..5, r in 1u64..4, m in 1u64..10, which in 0usize..3) {
        let conv = [CountingConvention::statement(), CountingConvention::proof(), CountingConvention::literal()][which];
        let all = enumerate_orbit_vectors(n, r, m, conv).unwrap();
        prop_assert!(all.iter().all(|v| satisfies(v, n, r, conv)));
        prop_assert!(all.windows(2).all(|w| w[0] != w[1]));
        if conv == CountingConvention::proof() {
            prop_assert_eq!(count_closed_general(n, r, m).unwrap(), all.len().into());
        }
    }

    #[test]
    fn fj_ledger_monotone_in_m_max(n_deg in -1i64..6, m_max in 1u64..8) {
        let conv = CountingConvention::default();
        let g = PoincarePolynomial::from_betti(&[1, 0, 0, 1]);
        let mut theta = ThetaDimsTable::new();
        for m in 1..=8 {
            for q in -1..=6 {
                if (m as i64 + q).rem_euclid(3) != 0 {
                    theta.insert(m, q, (m + q.unsigned_abs()) % 4).unwrap();
                }
            }
        }
        let cents: BTreeMap<u64, PoincarePolynomial> =
            (1..=8).map(|m| (m, centralizer_poincare(&g, m).unwrap())).collect();
        let small = fj_summand_indices(n_deg, 2, 2, 1, m_max, conv).unwrap();
        let large = fj_summand_indices(n_deg, 2, 2, 1, m_max + 1, conv).unwrap();
        for mode in [CoinvariantMode::UpperBound, CoinvariantMode::Trivial] {
            let a = fj_total_dimension(&small.indices, &cents, &theta, &mode).unwrap();
            let b = fj_total_dimension(&large.indices, &cents, &theta, &mode).unwrap();
            prop_assert!(a.total.known <= b.total.known);
            prop_assert!(a.total.unknown_entries <= b.total.unknown_entries);
        }
    }
}

#[test]
fn fullclass_order_axioms() {
    for a in [vec![2, 2], vec![2, 3], vec![2, 2, 2]] {
        let g = ColourSignature::new(a).unwrap();
        let classes = enumerate_full_classes(&g, 7, u64::MAX, 5000).unwrap();
        let p = FinitePoset::from_fn(classes, leq_fullclass).unwrap();
        assert!(validate_order(p.relation()).is_ok());
    }
}

#[test]
fn derivation_deterministic_under_instance_order() {
    let base = derive_2v().unwrap();
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..3 {
        let mut inst = instances_2v(8);
        inst.shuffle(&mut rng);
        let d = derive_2v_with_order(&inst).unwrap();
        assert_eq!(d.table, base.table);
    }
}

#[test]
fn replay_reproduces_group_values() {
    let d = derive_2v().unwrap();
    let assignment = replay(&d.log).unwrap();
    for (&k, &v) in &d.table {
        let reduced = if k == 0 { v - 1 } else { v };
        assert_eq!(assignment.get(&TermKey::Group(k)), Some(&reduced), "degree {k}");
    }
}

#[test]
fn betti_json_shape() {
    let b = BettiVector::empty();
    let text = serde_json::to_string(&b).unwrap();
    let back: BettiVector = serde_json::from_str(&text).unwrap();
    assert_eq!(back, b);
}
