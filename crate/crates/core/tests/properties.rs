use degseq::event::{SequenceEvent, SumProfile};
use degseq::graph::LabeledGraph;
use degseq::iso::{degree_count, is_isomorphic, iso_invariance_check, BorelSet};
use degseq::lab::Estimate;
use degseq::models::{binomial_seq_prob, multi_even_sum_identity};
use degseq::numerics::LogProb;
use degseq::sequence::all_sequences;
use degseq::{DegreeSequence, ModelParams, MultiSequence};
use proptest::prelude::*;

fn graph(max_n: usize) -> impl Strategy<Value = LabeledGraph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (Just(n), proptest::collection::vec(any::<bool>(), pairs)).prop_map(|(n, bits)| {
            let mut g = LabeledGraph::empty(n);
            let mut b = bits.into_iter();
            for u in 0..n {
                for v in u + 1..n {
                    if b.next().unwrap() {
                        g.add_edge(u, v);
                    }
                }
            }
            g
        })
    })
}

fn borel_set() -> impl Strategy<Value = BorelSet> {
    proptest::collection::vec((0u32..8, proptest::option::of(0u32..8)), 0..4).prop_map(|raw| {
        BorelSet::from_intervals(raw.into_iter().map(|(a, b)| (a, b.map(|b| a + b))).collect())
    })
}

proptest! {
    #[test]
    fn sequence_codes_roundtrip(n in 1usize..7, seed in any::<u64>()) {
        let size = (n as u64).pow(n as u32);
        let code = seed % size;
        let d = DegreeSequence::from_code(code, n);
        prop_assert_eq!(d.code(), code);
        prop_assert!(d.entries().iter().all(|&x| (x as usize) < n));
    }

    #[test]
    fn relabelled_graphs_are_isomorphic_with_equal_counts(
        g in graph(7),
        keys in proptest::collection::vec(any::<u32>(), 7),
        sets in proptest::collection::vec(borel_set(), 1..10),
    ) {
        let n = g.n();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by_key(|&v| (keys[v], v));
        let h = g.relabel(&perm).unwrap();
        prop_assert!(is_isomorphic(&g, &h).unwrap());
        prop_assert!(is_isomorphic(&h, &g).unwrap());
        prop_assert!(iso_invariance_check(&g, &h, &sets));
    }

    #[test]
    fn isomorphism_is_symmetric(a in graph(6), b in graph(6)) {
        if a.n() == b.n() {
            prop_assert_eq!(is_isomorphic(&a, &b).unwrap(), is_isomorphic(&b, &a).unwrap());
        }
        prop_assert!(is_isomorphic(&a, &a).unwrap());
    }

    #[test]
    fn counts_agree_for_graph_and_its_degrees(g in graph(9), set in borel_set()) {
        let d = g.degree_sequence();
        prop_assert_eq!(degree_count(&g, &set), degree_count(&d, &set));
        prop_assert_eq!(degree_count(&g, &set), g.degrees().iter().filter(|&&x| set.contains(x)).count());
    }

    #[test]
    fn edge_lists_roundtrip(g in graph(9)) {
        prop_assert_eq!(LabeledGraph::parse_edge_list(&g.to_edge_list(), Some(g.n())).unwrap(), g);
    }

    #[test]
    fn borel_sets_are_normalised(raw in proptest::collection::vec((0u32..20, proptest::option::of(0u32..6)), 0..6)) {
        let raw: Vec<(u32, Option<u32>)> = raw.into_iter().map(|(a, w)| (a, w.map(|w| a + w))).collect();
        let set = BorelSet::from_intervals(raw.clone());
        for w in set.intervals().windows(2) {
            let hi = w[0].1.expect("only the last interval is unbounded");
            prop_assert!(hi + 1 < w[1].0);
        }
        for d in 0..40 {
            let member = raw.iter().any(|&(lo, hi)| d >= lo && hi.is_none_or(|h| d <= h));
            prop_assert_eq!(set.contains(d), member);
        }
    }

    #[test]
    fn intervals_contain_estimates(hits in 0u64..1000, extra in 1u64..100_000) {
        let e = Estimate::new(hits, hits + extra);
        prop_assert!(e.ci_lo <= e.phat && e.phat <= e.ci_hi);
        prop_assert!(e.ci_lo >= 0.0 && e.ci_hi <= 1.0);
    }

    #[test]
    fn log_sums_match_direct_sums(ps in proptest::collection::vec(0.0f64..0.2, 0..40)) {
        let logs: Vec<LogProb> = ps.iter().map(|&p| LogProb::from_prob(p)).collect();
        let direct: f64 = ps.iter().sum();
        prop_assert!((LogProb::sum(&logs).prob() - direct).abs() <= 1e-14 * direct.max(1e-300));
    }

    #[test]
    fn profiles_reproduce_explicit_sums(mask in any::<u32>(), p in 0.05f64..0.95) {
        // An arbitrary subset of {0,1,2}^3.
        let all = all_sequences(3).unwrap();
        let members: Vec<DegreeSequence> = all.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, d)| d.clone()).collect();
        let params = ModelParams::single(3, p).unwrap();
        let direct: f64 = members.iter().map(|d| binomial_seq_prob(&params, 0, d).unwrap().prob()).sum();
        let profile = SumProfile::from_event(3, &SequenceEvent::from_points(members)).unwrap();
        prop_assert!((profile.binomial_prob(&[p]) - direct).abs() <= 1e-13);
    }

    #[test]
    fn restriction_identity_on_random_events(mask in proptest::collection::vec(any::<bool>(), 81), p1 in 0.05f64..0.95, p2 in 0.05f64..0.95) {
        let singles = all_sequences(3).unwrap();
        let mut event = Vec::new();
        for (i, a) in singles.iter().enumerate().take(9) {
            for (j, b) in singles.iter().enumerate().take(9) {
                if mask[i * 9 + j] {
                    event.push(MultiSequence::new(vec![a.clone(), b.clone()]).unwrap());
                }
            }
        }
        let (lhs, rhs) = multi_even_sum_identity(&ModelParams::new(3, vec![p1, p2]).unwrap(), &event).unwrap();
        prop_assert!(lhs.is_zero() == rhs.is_zero());
        if !lhs.is_zero() {
            prop_assert!(lhs.rel_diff(rhs) <= 1e-12);
        }
    }
}
