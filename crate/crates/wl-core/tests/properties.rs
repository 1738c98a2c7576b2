//! Quantified invariants over randomized graph batteries.

use proptest::prelude::*;
use proptest::strategy::ValueTree;

use wl_core::algorithm::AlgorithmSpec;
use wl_core::engine::{joint_distinguish, Verdict};
use wl_core::es::EquivariantSetSpec;
use wl_core::graph::{Graph, Permutation};
use wl_core::graph6::{parse_graph6, to_graph6};
use wl_core::oracles::are_isomorphic;

/// Arbitrary graph: node count plus a bit per upper-triangle slot.
fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (0..=max_n)
        .prop_flat_map(|n| {
            let slots = n * n.saturating_sub(1) / 2;
            (Just(n), prop::collection::vec(any::<bool>(), slots))
        })
        .prop_map(|(n, bits)| {
            let mut edges = Vec::new();
            let mut it = bits.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    if it.next().unwrap() {
                        edges.push((i, j));
                    }
                }
            }
            Graph::new(n, &edges).unwrap()
        })
}

fn arb_colored_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    arb_graph(max_n).prop_flat_map(|g| {
        let n = g.node_count();
        prop::collection::vec(0u32..3, n)
            .prop_map(move |colors| Graph::with_colors(g.node_count(), g.edges(), &colors).unwrap())
    })
}

fn arb_permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just(()).prop_perturb(move |_, mut rng| {
        let mut map: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            map.swap(i, j);
        }
        Permutation::from_vec(map).unwrap()
    })
}

/// All simple paths, minimized per endpoint pair; the independent route to
/// shortest-path distances.
fn exhaustive_spd(g: &Graph, src: usize, dst: usize) -> Option<usize> {
    fn dfs(
        g: &Graph,
        current: usize,
        dst: usize,
        visited: &mut Vec<bool>,
        len: usize,
        best: &mut Option<usize>,
    ) {
        if current == dst {
            *best = Some(best.map_or(len, |b: usize| b.min(len)));
            return;
        }
        for &u in g.neighbors(current) {
            if !visited[u] {
                visited[u] = true;
                dfs(g, u, dst, visited, len + 1, best);
                visited[u] = false;
            }
        }
    }
    let mut visited = vec![false; g.node_count()];
    visited[src] = true;
    let mut best = None;
    dfs(g, src, dst, &mut visited, 0, &mut best);
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph6_round_trips(g in arb_graph(40)) {
        let encoded = to_graph6(&g);
        let parsed = parse_graph6(&encoded).unwrap();
        prop_assert_eq!(parsed, g);
    }

    #[test]
    fn hop_sets_partition_the_ball(g in arb_graph(12), v_pick in any::<prop::sample::Index>(), k in 0usize..6) {
        prop_assume!(g.node_count() > 0);
        let v = v_pick.index(g.node_count());
        let ball = g.neighbors_within(v, k).unwrap();
        let mut union: Vec<usize> = Vec::new();
        for i in 0..=k {
            union.extend(g.kth_hop(v, i).unwrap());
        }
        union.sort_unstable();
        prop_assert_eq!(ball, union);
    }

    #[test]
    fn distances_match_exhaustive_path_enumeration(g in arb_graph(7)) {
        let n = g.node_count();
        for u in 0..n {
            for v in 0..n {
                let expected = if u == v { Some(0) } else { exhaustive_spd(&g, u, v) };
                match expected {
                    Some(d) => prop_assert_eq!(g.spd(u, v), d as u32),
                    None => prop_assert_eq!(g.spd(u, v), g.distances().infinity()),
                }
            }
        }
    }

    #[test]
    fn distance_table_is_a_metric_where_finite(g in arb_graph(12)) {
        let n = g.node_count();
        let inf = g.distances().infinity();
        for u in 0..n {
            prop_assert_eq!(g.spd(u, u), 0);
            for v in 0..n {
                prop_assert_eq!(g.spd(u, v), g.spd(v, u));
                for w in 0..n {
                    let (a, b, c) = (g.spd(u, v), g.spd(u, w), g.spd(w, v));
                    if b < inf && c < inf {
                        prop_assert!(a <= b + c, "triangle violated: d({u},{v})={a} > {b}+{c}");
                    }
                }
            }
        }
    }

    #[test]
    fn relabeling_preserves_profiles_and_isomorphism(g in arb_colored_graph(9)) {
        let n = g.node_count();
        let strategy = arb_permutation(n);
        let mut runner = proptest::test_runner::TestRunner::deterministic();
        let p = strategy.new_tree(&mut runner).unwrap().current();
        let h = g.apply_permutation(&p).unwrap();
        prop_assert_eq!(g.edge_count(), h.edge_count());
        prop_assert_eq!(g.degree_sequence(), h.degree_sequence());
        let mut gc = g.colors().to_vec();
        let mut hc = h.colors().to_vec();
        gc.sort_unstable();
        hc.sort_unstable();
        prop_assert_eq!(gc, hc);
        prop_assert!(are_isomorphic(&g, &h));
    }

    #[test]
    fn oracle_equivalence_forces_refinement_equivalence(g in arb_colored_graph(8), seed in any::<u64>()) {
        // Soundness: graphs the oracle proves isomorphic can never be
        // distinguished, under any rule.
        let n = g.node_count();
        let mut rng = wl_core::generators::SplitMix64::new(seed);
        let p = Permutation::random(n, &mut rng);
        let h = g.apply_permutation(&p).unwrap();
        prop_assert!(are_isomorphic(&g, &h));
        for spec in ["1wl", "kwl(2)", "kfwl(2)", "ktfwl(2,2)", "n2fwl(h=1)", "n2fwl(h=inf)"] {
            let spec = AlgorithmSpec::new(spec.parse().unwrap());
            let verdict = joint_distinguish(&spec, &g, &h).unwrap();
            prop_assert!(matches!(verdict, Verdict::Equivalent { .. }), "{:?}", verdict);
        }
    }

    #[test]
    fn distinguishing_verdicts_imply_oracle_nonisomorphism(a in arb_graph(7), b in arb_graph(7)) {
        // Completeness direction of the pairing: a separation verdict is a
        // non-isomorphism proof, so it must agree with the oracle.
        for spec in ["1wl", "kfwl(2)", "ktfwl(2,2)"] {
            let spec = AlgorithmSpec::new(spec.parse().unwrap());
            if let Verdict::Distinguished { .. } = joint_distinguish(&spec, &a, &b).unwrap() {
                prop_assert!(!are_isomorphic(&a, &b));
            }
        }
    }

    #[test]
    fn equivariant_sets_commute_with_relabeling(g in arb_graph(9), seed in any::<u64>()) {
        prop_assume!(g.node_count() >= 2);
        let n = g.node_count();
        let mut rng = wl_core::generators::SplitMix64::new(seed);
        let p = Permutation::random(n, &mut rng);
        let gp = g.apply_permutation(&p).unwrap();
        let v = [rng.next_below(n), rng.next_below(n)];
        let pv: Vec<usize> = v.iter().map(|&x| p.apply(x)).collect();
        for (name, k, spec) in wl_core::es::builtin_specs() {
            if k != 2 {
                continue;
            }
            let mut mapped: Vec<Vec<usize>> = spec
                .evaluate(&g, &v)
                .unwrap()
                .into_iter()
                .map(|w| w.iter().map(|&x| p.apply(x)).collect())
                .collect();
            mapped.sort();
            let mut direct = spec.evaluate(&gp, &pv).unwrap();
            direct.sort();
            prop_assert_eq!(mapped, direct, "equivariance failed for {}", name);
        }
    }

    #[test]
    fn es_grammar_round_trips(coords in prop::collection::vec(0usize..9, 1..4), h in 1u32..5, inf in any::<bool>()) {
        use wl_core::es::{BaseSet, GlobalFilter, Hops};
        let hops = if inf { Hops::Infinite } else { Hops::Finite(h) };
        let bases: Vec<BaseSet> = coords
            .iter()
            .map(|&c| match c {
                0 => BaseSet::Global,
                1 => BaseSet::ClosedNbr(1),
                2 => BaseSet::ClosedNbr(2),
                3 => BaseSet::OpenNbr(1),
                4 => BaseSet::HopBall(2, hops),
                5 => BaseSet::UnionOpenNbrs,
                6 => BaseSet::UnionClosedNbrs,
                7 => BaseSet::CommonNbr,
                _ => BaseSet::GeodesicSet,
            })
            .collect();
        let spec = EquivariantSetSpec::new(bases, if inf { Some(GlobalFilter::HopOverlap(hops)) } else { None });
        let printed = spec.to_string();
        let reparsed: EquivariantSetSpec = printed.parse().unwrap();
        prop_assert_eq!(spec, reparsed);
    }
}
