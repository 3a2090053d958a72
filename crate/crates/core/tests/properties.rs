use caterpillar_core::counts::{self, Family};
use caterpillar_core::newick::{parse_newick, to_newick};
use caterpillar_core::perm::{self, Permutation};
use caterpillar_core::tree::{self, canonicalize, BinaryTree, NodeId, OrderedTree};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn arb_tree(max: usize) -> impl Strategy<Value = OrderedTree> {
    (1..=max, proptest::collection::vec(any::<u32>(), max)).prop_map(|(n, splits)| {
        fn build(n: usize, s: &mut std::slice::Iter<'_, u32>) -> OrderedTree {
            if n == 1 {
                return OrderedTree::Leaf;
            }
            let l = 1 + (*s.next().unwrap_or(&0) as usize) % (n - 1);
            let left = build(l, s);
            OrderedTree::join(left, build(n - l, s))
        }
        build(n, &mut splits.iter())
    })
}

/// Gamma straight from the definition: the biggest subtree passing the
/// caterpillar test.
fn gamma_by_definition(t: &OrderedTree) -> usize {
    t.node_ids()
        .iter()
        .map(|id| t.subtree(id).unwrap())
        .filter(|s| s.is_caterpillar())
        .map(BinaryTree::size)
        .max()
        .unwrap()
}

proptest! {
    #[test]
    fn gamma_matches_definition(t in arb_tree(60)) {
        let g = t.gamma();
        prop_assert_eq!(g, gamma_by_definition(&t));
        prop_assert!(g <= t.size());
        prop_assert!(t.size() == 1 || g >= 2);
        prop_assert_eq!(g == t.size(), t.is_caterpillar());
    }

    #[test]
    fn colless_bounds(t in arb_tree(60)) {
        prop_assume!(t.size() > 2);
        let c = t.colless_index().unwrap();
        prop_assert!(c >= BigRational::zero() && c <= BigRational::one());
        prop_assert_eq!(c == BigRational::one(), t.is_caterpillar());
        let by_nodes: usize = t.node_ids().iter().map(|id| t.imbalance_at(id).unwrap()).sum();
        prop_assert_eq!(by_nodes, t.colless_sum());
    }

    #[test]
    fn shape_statistics_ignore_sibling_order(t in arb_tree(60)) {
        let m = t.mirror();
        prop_assert_eq!(m.gamma(), t.gamma());
        prop_assert_eq!(m.colless_sum(), t.colless_sum());
        prop_assert_eq!(canonicalize(&m), canonicalize(&t));
        prop_assert_eq!(canonicalize(&t).gamma(), t.gamma());
        prop_assert_eq!(canonicalize(&t).size(), t.size());
    }

    #[test]
    fn node_count_and_addressing(t in arb_tree(60)) {
        let ids = t.node_ids();
        prop_assert_eq!(ids.len(), 2 * t.size() - 1);
        let leaves = ids.iter().filter(|id| t.subtree(id).unwrap().is_leaf()).count();
        prop_assert_eq!(leaves, t.size());
        let deepest = ids.iter().map(NodeId::depth).max().unwrap();
        let mut past = ids[ids.len() - 1].clone();
        for _ in 0..=deepest {
            past = past.child(caterpillar_core::Side::Left);
        }
        prop_assert!(t.subtree(&past).is_none());
    }

    #[test]
    fn newick_round_trip(t in arb_tree(200)) {
        let text = to_newick::<&str>(&t, None).unwrap();
        let doc = parse_newick(&text).unwrap();
        prop_assert_eq!(&doc.parsed, &t);
        let names = doc.leaf_names.unwrap();
        prop_assert_eq!(names.len(), t.size());
    }

    #[test]
    fn newick_rerender_drops_decoration(t in arb_tree(40), len in 0.0f64..100.0) {
        let plain = to_newick::<&str>(&t, None).unwrap();
        let decorated = plain
            .replace(',', &format!(":{len} , "))
            .replace(')', &format!(":{len})inner"));
        let doc = parse_newick(&decorated).unwrap();
        prop_assert_eq!(&doc.parsed, &t);
        let rerendered = to_newick(&doc.parsed, doc.leaf_names.as_deref()).unwrap();
        prop_assert_eq!(rerendered, plain);
    }

    #[test]
    fn newick_never_panics(s in "[(),;:a-c0-9 .]{0,40}") {
        if let Ok(doc) = parse_newick(&s) {
            let back = to_newick(&doc.parsed, None::<&[&str]>).unwrap();
            prop_assert_eq!(parse_newick(&back).unwrap().parsed, doc.parsed);
        }
    }

    #[test]
    fn phi_round_trip(t in arb_tree(40)) {
        prop_assume!(t.size() >= 2);
        let p = perm::phi(&t).unwrap();
        prop_assert_eq!(p.len(), t.size() - 1);
        prop_assert!(perm::avoids_132(&p));
        prop_assert_eq!(perm::phi_inverse(&p).unwrap(), t.clone());
        prop_assert_eq!(perm::gamma_from_perm(&p).unwrap() + 1, t.gamma());
    }

    #[test]
    fn singleton_law(v in proptest::collection::vec(any::<u32>(), 1..30), pick in any::<usize>()) {
        let p = Permutation::normalize(&v.iter().enumerate().map(|(i, &x)| x as usize * 64 + i).collect::<Vec<_>>());
        let i = pick % p.len();
        let (lo, hi) = perm::r_window(&p, i).unwrap();
        let r = perm::r_tilde(&p, i + 1).unwrap();
        prop_assert_eq!(r.len(), hi - lo + 1);
        prop_assert_eq!(r.entries()[i - lo], r.len());
    }
}

/// Node m of t (labelled in pre-order) heads a caterpillar with k + 1
/// leaves iff the extraction around label m avoids 231 and has size k.
#[test]
fn caterpillar_subtrees_are_231_avoiding_extractions() {
    for size in 2..=9 {
        for t in tree::enumerate_ordered(size).unwrap() {
            let p = perm::phi(&t).unwrap();
            let internal: Vec<NodeId> = t
                .node_ids()
                .into_iter()
                .filter(|id| !t.subtree(id).unwrap().is_leaf())
                .collect();
            for (j, id) in internal.iter().enumerate() {
                let label = size - 1 - j;
                let sub = t.subtree(id).unwrap();
                let r = perm::r_tilde(&p, p.position_of(label).unwrap() + 1).unwrap();
                assert_eq!(r.len() + 1, sub.size(), "{t} at {id}");
                assert_eq!(sub.is_caterpillar(), perm::avoids_231(&r), "{t} at {id}");
            }
        }
    }
}

#[test]
fn valley_or_peak_characterization() {
    for n in 1..=10 {
        for p in perm::av132(n).unwrap() {
            assert_eq!(
                perm::all_rtilde_contain_231(&p),
                perm::valley_or_peak_condition(&p),
                "{p}"
            );
        }
    }
}

#[test]
fn rtilde_count_matches_pitchfork_free_trees() {
    for n in 1..=11 {
        assert_eq!(
            perm::count_all_rtilde_contain_231(n).unwrap(),
            counts::f_minus(2, n + 1),
            "n = {n}"
        );
    }
}

#[test]
fn engine_identities() {
    for n in 1..=40 {
        let mut by_k = BigInt::zero();
        for k in 1..=n {
            by_k += counts::f_exact(k, n);
            assert_eq!(
                counts::f_minus(k, n) + counts::f_plus(k + 1, n),
                counts::catalan(n)
            );
        }
        assert_eq!(by_k, counts::catalan(n));
        let unordered: BigInt = (1..=n).map(|k| counts::w_exact(k, n)).sum();
        assert_eq!(unordered, counts::wedderburn(n));
        assert_eq!(
            counts::count_all(Family::Unordered, n),
            counts::wedderburn(n)
        );
    }
}

#[test]
fn enumerations_agree_with_counts() {
    for n in 1..=11 {
        assert_eq!(
            BigInt::from(tree::enumerate_ordered(n).unwrap().count()),
            counts::catalan(n)
        );
        assert_eq!(
            BigInt::from(tree::enumerate_unordered(n).unwrap().count()),
            counts::wedderburn(n)
        );
    }
}
