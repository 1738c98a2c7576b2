//! Desk-scale verification batteries.
//!
//! Each battery bundles a family of deterministic checks — separation
//! verdicts on hard instances, oracle cross-comparisons, and quantified
//! invariants with fixed seeds — and reports one pass/fail outcome per
//! check. The CLI `suite` command and the acceptance tests both run these.
//! Battery outcomes contain no wall-clock data, so their serialization is
//! byte-stable across runs; timings are reported separately.

use std::time::Instant;

use serde::Serialize;

use crate::algorithm::{Algorithm, AlgorithmSpec};
use crate::engine::{joint_distinguish, lockstep_refine, refine, Verdict};
use crate::es::{builtin_specs, EquivariantSetSpec, Hops};
use crate::generators::{cfi_pair, csl_graph, random_graph, srg_pair, SplitMix64};
use crate::graph::{Graph, Permutation};
use crate::ktfwl::NeighborhoodPattern;
use crate::oracles::{are_isomorphic, count_substructure, SubstructureKind};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatteryOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl BatteryOutcome {
    fn new(name: &'static str, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        BatteryOutcome {
            name,
            passed,
            checks,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub level: &'static str,
    pub passed: bool,
    pub batteries: Vec<BatteryOutcome>,
}

/// Wall-clock per battery, kept out of [`SuiteReport`] so verdict reports
/// stay byte-identical across runs.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteTimings {
    pub batteries: Vec<(String, u128)>,
    pub total_ms: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteLevel {
    Desk,
}

impl std::str::FromStr for SuiteLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "desk" => Ok(SuiteLevel::Desk),
            other => Err(format!("unknown suite level `{other}` (expected `desk`)")),
        }
    }
}

pub fn run_suite(_level: SuiteLevel) -> (SuiteReport, SuiteTimings) {
    let batteries: Vec<fn() -> BatteryOutcome> = vec![
        battery_classical_baseline,
        battery_srg_separation,
        battery_companion_hierarchy,
        battery_six_node_exhaustive,
        battery_fwl_t1_agreement,
        battery_counting_separation,
        battery_clique_contrast,
        battery_invariant_properties,
        battery_report_determinism,
    ];
    let start = Instant::now();
    let mut outcomes = Vec::with_capacity(batteries.len());
    let mut times = Vec::with_capacity(batteries.len());
    for battery in batteries {
        let t0 = Instant::now();
        let outcome = battery();
        times.push((outcome.name.to_string(), t0.elapsed().as_millis()));
        outcomes.push(outcome);
    }
    let passed = outcomes.iter().all(|b| b.passed);
    let report = SuiteReport {
        tool: "wl",
        version: env!("CARGO_PKG_VERSION"),
        level: "desk",
        passed,
        batteries: outcomes,
    };
    let timings = SuiteTimings {
        batteries: times,
        total_ms: start.elapsed().as_millis(),
    };
    (report, timings)
}

fn verdict_str(v: &Verdict) -> String {
    match v {
        Verdict::Distinguished { at_iteration } => format!("distinguished@{at_iteration}"),
        Verdict::Equivalent { iterations } => format!("equivalent({iterations})"),
        Verdict::Inconclusive { cap } => format!("inconclusive(cap={cap})"),
    }
}

fn push(
    checks: &mut Vec<Check>,
    label: impl Into<String>,
    passed: bool,
    detail: impl Into<String>,
) {
    checks.push(Check {
        label: label.into(),
        passed,
        detail: detail.into(),
    });
}

fn alg(s: &str) -> AlgorithmSpec {
    AlgorithmSpec::new(s.parse::<Algorithm>().expect("suite algorithm specs parse"))
}

fn c6() -> Graph {
    Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]).unwrap()
}

fn two_triangles() -> Graph {
    Graph::new(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
}

// ---------------------------------------------------------------------------
// Battery 1: the classical pair every refinement text opens with
// ---------------------------------------------------------------------------

pub fn battery_classical_baseline() -> BatteryOutcome {
    let mut checks = Vec::new();
    let g = c6();
    let h = two_triangles();

    let v = joint_distinguish(&alg("1wl"), &g, &h).unwrap();
    push(
        &mut checks,
        "1wl cannot split C6 from 2C3",
        matches!(v, Verdict::Equivalent { .. }),
        verdict_str(&v),
    );

    let v = joint_distinguish(&alg("kfwl(2)"), &g, &h).unwrap();
    push(
        &mut checks,
        "kfwl(2) splits C6 from 2C3",
        matches!(v, Verdict::Distinguished { .. }),
        verdict_str(&v),
    );
    BatteryOutcome::new("classical-baseline", checks)
}

// ---------------------------------------------------------------------------
// Battery 2: strongly regular pair
// ---------------------------------------------------------------------------

pub fn battery_srg_separation() -> BatteryOutcome {
    let mut checks = Vec::new();
    let pair = srg_pair();

    let v = joint_distinguish(&alg("kfwl(2)"), &pair.shrikhande, &pair.rook).unwrap();
    push(
        &mut checks,
        "kfwl(2) cannot split shrikhande from rook",
        matches!(v, Verdict::Equivalent { .. }),
        verdict_str(&v),
    );

    let v = joint_distinguish(&alg("n2fwl(h=1)"), &pair.shrikhande, &pair.rook).unwrap();
    push(
        &mut checks,
        "n2fwl(h=1) splits shrikhande from rook",
        matches!(v, Verdict::Distinguished { .. }),
        verdict_str(&v),
    );
    BatteryOutcome::new("srg-separation", checks)
}

// ---------------------------------------------------------------------------
// Battery 3: companion-pair hierarchy
// ---------------------------------------------------------------------------

pub fn battery_companion_hierarchy() -> BatteryOutcome {
    let mut checks = Vec::new();

    let pair3 = cfi_pair(3).unwrap();
    push(
        &mut checks,
        "companion pair k=3 has 28 nodes per side",
        pair3.g_side.node_count() == 28 && pair3.h_side.node_count() == 28,
        format!(
            "{} / {}",
            pair3.g_side.node_count(),
            pair3.h_side.node_count()
        ),
    );

    let v = joint_distinguish(&alg("ktfwl(2,1)"), &pair3.g_side, &pair3.h_side).unwrap();
    push(
        &mut checks,
        "ktfwl(2,1) cannot split companion pair k=3",
        matches!(v, Verdict::Equivalent { .. }),
        verdict_str(&v),
    );

    let v = joint_distinguish(&alg("ktfwl(2,2)"), &pair3.g_side, &pair3.h_side).unwrap();
    push(
        &mut checks,
        "ktfwl(2,2) splits companion pair k=3",
        matches!(v, Verdict::Distinguished { .. }),
        verdict_str(&v),
    );

    let pair2 = cfi_pair(2).unwrap();
    let v = joint_distinguish(&alg("ktfwl(2,1)"), &pair2.g_side, &pair2.h_side).unwrap();
    push(
        &mut checks,
        "ktfwl(2,1) splits companion pair k=2",
        matches!(v, Verdict::Distinguished { .. }),
        verdict_str(&v),
    );
    BatteryOutcome::new("companion-hierarchy", checks)
}

// ---------------------------------------------------------------------------
// Battery 4: exhaustive 6-node agreement with the isomorphism oracle
// ---------------------------------------------------------------------------

/// One representative per isomorphism class of simple graphs on 6 nodes,
/// canonicalized by minimizing the 15-bit edge mask over all relabelings.
pub fn six_node_representatives() -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..6)
        .flat_map(|i| (i + 1..6).map(move |j| (i, j)))
        .collect();
    let mut bit_of = [[0usize; 6]; 6];
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        bit_of[i][j] = idx;
        bit_of[j][i] = idx;
    }
    let perms = permutations_of_six();
    let mut reps = Vec::new();
    for mask in 0u16..(1 << 15) {
        let mut canonical = mask;
        for p in &perms {
            let mut relabeled = 0u16;
            for (idx, &(i, j)) in pairs.iter().enumerate() {
                if mask >> idx & 1 == 1 {
                    relabeled |= 1 << bit_of[p[i]][p[j]];
                }
            }
            canonical = canonical.min(relabeled);
        }
        if canonical == mask {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(idx, _)| mask >> idx & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            reps.push(Graph::new(6, &edges).unwrap());
        }
    }
    reps
}

fn permutations_of_six() -> Vec<[usize; 6]> {
    let mut perms = Vec::with_capacity(720);
    let mut items = [0, 1, 2, 3, 4, 5];
    heap_permutations(&mut items, 6, &mut perms);
    perms
}

fn heap_permutations(items: &mut [usize; 6], k: usize, out: &mut Vec<[usize; 6]>) {
    if k == 1 {
        out.push(*items);
        return;
    }
    for i in 0..k {
        heap_permutations(items, k - 1, out);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

pub fn battery_six_node_exhaustive() -> BatteryOutcome {
    let mut checks = Vec::new();
    let reps = six_node_representatives();
    push(
        &mut checks,
        "156 isomorphism classes on 6 nodes",
        reps.len() == 156,
        format!("found {}", reps.len()),
    );

    let spec = alg("ktfwl(2,4)");
    let mut pair_count = 0usize;
    let mut mismatches: Vec<String> = Vec::new();
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            pair_count += 1;
            let oracle = are_isomorphic(&reps[i], &reps[j]);
            let verdict = joint_distinguish(&spec, &reps[i], &reps[j]).unwrap();
            let agree = match verdict {
                Verdict::Distinguished { .. } => !oracle,
                Verdict::Equivalent { .. } => oracle,
                Verdict::Inconclusive { .. } => false,
            };
            if !agree && mismatches.len() < 5 {
                mismatches.push(format!(
                    "pair ({i},{j}): oracle={oracle} verdict={}",
                    verdict_str(&verdict)
                ));
            }
        }
    }
    push(
        &mut checks,
        "ktfwl(2,4) verdict agrees with the isomorphism oracle on every distinct pair",
        mismatches.is_empty(),
        if mismatches.is_empty() {
            format!("{pair_count} pairs checked")
        } else {
            mismatches.join("; ")
        },
    );

    // Isomorphic direction: relabeled copies must come back equivalent.
    let mut rng = SplitMix64::new(0x5eed_0006);
    let mut twin_failures = Vec::new();
    for idx in (0..reps.len()).step_by(16) {
        let g = &reps[idx];
        let p = Permutation::random(6, &mut rng);
        let twin = g.apply_permutation(&p).unwrap();
        let oracle = are_isomorphic(g, &twin);
        let verdict = joint_distinguish(&spec, g, &twin).unwrap();
        if !(oracle && matches!(verdict, Verdict::Equivalent { .. })) && twin_failures.len() < 5 {
            twin_failures.push(format!(
                "class {idx}: oracle={oracle} verdict={}",
                verdict_str(&verdict)
            ));
        }
    }
    push(
        &mut checks,
        "ktfwl(2,4) reports relabeled copies equivalent",
        twin_failures.is_empty(),
        if twin_failures.is_empty() {
            "10 relabeled twins checked".to_string()
        } else {
            twin_failures.join("; ")
        },
    );
    BatteryOutcome::new("six-node-exhaustive", checks)
}

// ---------------------------------------------------------------------------
// Battery 5: (2,1) replacement agrees with the folklore rule
// ---------------------------------------------------------------------------

pub fn battery_fwl_t1_agreement() -> BatteryOutcome {
    let mut checks = Vec::new();
    let a = alg("ktfwl(2,1)");
    let b = alg("kfwl(2)");

    let mut disagreements = Vec::new();
    let pairs = 200usize;
    for i in 0..pairs {
        let g = random_graph(12, 0.3, 41_000 + 2 * i as u64).unwrap();
        let h = random_graph(12, 0.3, 41_001 + 2 * i as u64).unwrap();
        let va = joint_distinguish(&a, &g, &h).unwrap();
        let vb = joint_distinguish(&b, &g, &h).unwrap();
        if va != vb && disagreements.len() < 5 {
            disagreements.push(format!(
                "pair {i}: {} vs {}",
                verdict_str(&va),
                verdict_str(&vb)
            ));
        }
    }
    push(
        &mut checks,
        "identical verdicts on 200 random 12-node pairs",
        disagreements.is_empty(),
        if disagreements.is_empty() {
            format!("{pairs} pairs")
        } else {
            disagreements.join("; ")
        },
    );

    let srg = srg_pair();
    let cfi2 = cfi_pair(2).unwrap();
    let cfi3 = cfi_pair(3).unwrap();
    let csl_a = csl_graph(41, 2).unwrap();
    let csl_b = csl_graph(41, 3).unwrap();
    let builtins: Vec<(&str, &Graph, &Graph)> = vec![
        ("srg", &srg.shrikhande, &srg.rook),
        ("cfi(2)", &cfi2.g_side, &cfi2.h_side),
        ("cfi(3)", &cfi3.g_side, &cfi3.h_side),
        ("csl(41,2,3)", &csl_a, &csl_b),
    ];
    for (name, g, h) in builtins {
        let va = joint_distinguish(&a, g, h).unwrap();
        let vb = joint_distinguish(&b, g, h).unwrap();
        push(
            &mut checks,
            format!("identical verdicts on builtin {name}"),
            va == vb,
            format!("{} vs {}", verdict_str(&va), verdict_str(&vb)),
        );
    }
    BatteryOutcome::new("fwl-t1-agreement", checks)
}

// ---------------------------------------------------------------------------
// Battery 6: counting power exercised as separation
// ---------------------------------------------------------------------------

pub fn battery_counting_separation() -> BatteryOutcome {
    let mut checks = Vec::new();
    let spec = alg("n2fwl(h=inf)");
    let kinds = [
        SubstructureKind::Cycle6,
        SubstructureKind::Clique4,
        SubstructureKind::Path4,
    ];

    let mut found = 0usize;
    let mut failures = Vec::new();
    let mut seed = 60_000u64;
    let mut attempts = 0usize;
    while found < 50 && attempts < 400 {
        attempts += 1;
        let n = 10 + (attempts % 7);
        let g = random_graph(n, 0.25, seed).unwrap();
        let h = random_graph(n, 0.25, seed + 1).unwrap();
        seed += 2;
        let differs = kinds.iter().any(|&k| {
            count_substructure(&g, k).unwrap().total != count_substructure(&h, k).unwrap().total
        });
        if !differs {
            continue;
        }
        found += 1;
        let v = joint_distinguish(&spec, &g, &h).unwrap();
        if !matches!(v, Verdict::Distinguished { .. }) && failures.len() < 5 {
            failures.push(format!("seed {}: {}", seed - 2, verdict_str(&v)));
        }
    }
    push(
        &mut checks,
        "collected 50 pairs with differing 6-cycle/4-clique/4-path counts",
        found >= 50,
        format!("{found} pairs in {attempts} attempts"),
    );
    push(
        &mut checks,
        "n2fwl(h=inf) splits every count-differing pair",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{found} pairs split")
        } else {
            failures.join("; ")
        },
    );
    BatteryOutcome::new("counting-separation", checks)
}

// ---------------------------------------------------------------------------
// Battery 7: 4-clique contrast on the strongly regular pair
// ---------------------------------------------------------------------------

pub fn battery_clique_contrast() -> BatteryOutcome {
    let mut checks = Vec::new();
    let pair = srg_pair();
    let rook = count_substructure(&pair.rook, SubstructureKind::Clique4).unwrap();
    let shri = count_substructure(&pair.shrikhande, SubstructureKind::Clique4).unwrap();
    push(
        &mut checks,
        "rook has 4-cliques, shrikhande has none",
        rook.total > 0 && shri.total == 0,
        format!("rook={} shrikhande={}", rook.total, shri.total),
    );
    let v = joint_distinguish(&alg("kfwl(2)"), &pair.shrikhande, &pair.rook).unwrap();
    push(
        &mut checks,
        "kfwl(2) is blind to the 4-clique difference",
        matches!(v, Verdict::Equivalent { .. }),
        verdict_str(&v),
    );
    BatteryOutcome::new("clique-contrast", checks)
}

// ---------------------------------------------------------------------------
// Battery 8: quantified invariants with fixed seeds
// ---------------------------------------------------------------------------

fn all_algorithm_variants() -> Vec<&'static str> {
    vec![
        "1wl",
        "kwl(2)",
        "kwl(3)",
        "kfwl(2)",
        "kfwl(3)",
        "ktfwl(2,1)",
        "ktfwl(2,2)",
        "ktfwl(2,3)",
        "ktfwl(3,1)",
        "ktfwl+(2,1,union_closed)",
        "ktfwl+(2,1,union_open)",
        "ktfwl+(2,2,common_nbr*2)",
        "ktfwl+(2,2,prod(open_nbr(2),open_nbr(1)))",
        "ktfwl+(2,1,spd_shell)",
        "ktfwl+(2,2,prod(open_nbr(2),geodesic))",
        "n2fwl(h=1)",
        "n2fwl(h=2)",
        "n2fwl(h=inf)",
    ]
}

pub fn battery_invariant_properties() -> BatteryOutcome {
    let mut checks = Vec::new();
    let graphs: Vec<(String, Graph)> = vec![
        ("c6".into(), c6()),
        ("2c3".into(), two_triangles()),
        ("gnp(8,0.35)".into(), random_graph(8, 0.35, 81).unwrap()),
        ("gnp(8,0.6)".into(), random_graph(8, 0.6, 82).unwrap()),
    ];

    // Histogram invariance under relabeling, for every algorithm variant.
    let mut rng = SplitMix64::new(0x5eed_0008);
    let mut failures = Vec::new();
    let mut runs = 0usize;
    for spec_str in all_algorithm_variants() {
        let spec = alg(spec_str);
        for (gname, g) in &graphs {
            for _ in 0..3 {
                let p = Permutation::random(g.node_count(), &mut rng);
                let permuted = g.apply_permutation(&p).unwrap();
                let v = joint_distinguish(&spec, g, &permuted).unwrap();
                runs += 1;
                if !matches!(v, Verdict::Equivalent { .. }) && failures.len() < 5 {
                    failures.push(format!("{spec_str} on {gname}: {}", verdict_str(&v)));
                }
            }
        }
    }
    push(
        &mut checks,
        "histograms invariant under relabeling for every algorithm variant",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{runs} relabeled runs")
        } else {
            failures.join("; ")
        },
    );

    // Monotone refinement: per-round class counts never decrease.
    let mut failures = Vec::new();
    for spec_str in all_algorithm_variants() {
        let spec = alg(spec_str);
        for (gname, g) in &graphs {
            let result = refine(&spec, g).unwrap();
            if !result.class_counts.windows(2).all(|w| w[0] <= w[1]) && failures.len() < 5 {
                failures.push(format!("{spec_str} on {gname}: {:?}", result.class_counts));
            }
        }
    }
    push(
        &mut checks,
        "partition refinement is monotone every round",
        failures.is_empty(),
        if failures.is_empty() {
            "all runs monotone".to_string()
        } else {
            failures.join("; ")
        },
    );

    // Equivariance of every built-in neighbor-set construction.
    let mut rng = SplitMix64::new(0x5eed_0009);
    let mut failures = Vec::new();
    let es_graphs = [c6(), random_graph(9, 0.35, 83).unwrap()];
    for (name, k, spec) in builtin_specs() {
        for g in &es_graphs {
            let n = g.node_count();
            for _ in 0..100 {
                let p = Permutation::random(n, &mut rng);
                let gp = g.apply_permutation(&p).unwrap();
                let v = [rng.next_below(n), rng.next_below(n)];
                debug_assert_eq!(k, 2);
                let pv: Vec<usize> = v.iter().map(|&x| p.apply(x)).collect();
                let mut mapped: Vec<Vec<usize>> = spec
                    .evaluate(g, &v)
                    .unwrap()
                    .into_iter()
                    .map(|w| w.iter().map(|&x| p.apply(x)).collect())
                    .collect();
                mapped.sort();
                let mut direct = spec.evaluate(&gp, &pv).unwrap();
                direct.sort();
                if mapped != direct && failures.len() < 5 {
                    failures.push(format!("{name} at {v:?}"));
                }
            }
        }
    }
    push(
        &mut checks,
        "built-in neighbor sets are equivariant under 100 relabelings each",
        failures.is_empty(),
        if failures.is_empty() {
            "all equivariant".to_string()
        } else {
            failures.join("; ")
        },
    );

    // Neighborhood-tuple length law, exhaustive for small arities.
    let mut failures = Vec::new();
    for k in 1..=4usize {
        for t in 1..=4usize {
            let expected: usize = (0..=k.min(t))
                .map(|m| binomial(k, m) * binomial(t, m))
                .sum();
            let got = NeighborhoodPattern::new(k, t).unwrap().len();
            if got != expected {
                failures.push(format!("k={k} t={t}: {got} != {expected}"));
            }
        }
    }
    push(
        &mut checks,
        "neighborhood tuple length matches the binomial sum for k,t <= 4",
        failures.is_empty(),
        if failures.is_empty() {
            "16 arity combinations".to_string()
        } else {
            failures.join("; ")
        },
    );

    // t = 1 degeneration: single-replacement refinement computes the
    // folklore partitions exactly.
    let mut failures = Vec::new();
    for (gname, g) in &graphs {
        let base = refine(&alg("kfwl(2)"), g).unwrap();
        let t1 = refine(&alg("ktfwl(2,1)"), g).unwrap();
        let plus = refine(
            &AlgorithmSpec::new(Algorithm::KtFwlPlus {
                k: 2,
                t: 1,
                es: EquivariantSetSpec::global(1),
            }),
            g,
        )
        .unwrap();
        if base.coloring.canonical_partition() != t1.coloring.canonical_partition()
            || base.coloring.canonical_partition() != plus.coloring.canonical_partition()
        {
            failures.push(gname.clone());
        }
    }
    push(
        &mut checks,
        "t=1 tuple refinement degenerates to the folklore partition",
        failures.is_empty(),
        if failures.is_empty() {
            "partitions identical".to_string()
        } else {
            failures.join("; ")
        },
    );

    // Containment chain for the overlapping-subgraph neighborhood.
    let g = random_graph(10, 0.3, 84).unwrap();
    let mut ok = true;
    for v1 in 0..10 {
        for v2 in 0..10 {
            let mut prev: Option<Vec<(usize, usize)>> = None;
            for h in [
                Hops::Finite(1),
                Hops::Finite(2),
                Hops::Finite(3),
                Hops::Infinite,
            ] {
                let cur = crate::ktfwl::n2_neighborhood(&g, (v1, v2), h);
                if let Some(p) = &prev {
                    ok &= p.iter().all(|x| cur.contains(x));
                }
                prev = Some(cur);
            }
        }
    }
    push(
        &mut checks,
        "n2 neighborhoods grow monotonically with h",
        ok,
        "chain h=1,2,3,inf".to_string(),
    );

    BatteryOutcome::new("invariant-properties", checks)
}

fn binomial(n: usize, m: usize) -> usize {
    if m > n {
        return 0;
    }
    let mut num = 1usize;
    let mut den = 1usize;
    for i in 0..m {
        num *= n - i;
        den *= i + 1;
    }
    num / den
}

// ---------------------------------------------------------------------------
// Battery 9 (in-process half): verdict serialization is reproducible
// ---------------------------------------------------------------------------

pub fn battery_report_determinism() -> BatteryOutcome {
    let mut checks = Vec::new();
    let first = serde_json::to_string(&battery_classical_baseline()).unwrap();
    let second = serde_json::to_string(&battery_classical_baseline()).unwrap();
    push(
        &mut checks,
        "classical baseline serializes identically twice",
        first == second,
        format!("{} bytes", first.len()),
    );

    let first = serde_json::to_string(&battery_clique_contrast()).unwrap();
    let second = serde_json::to_string(&battery_clique_contrast()).unwrap();
    push(
        &mut checks,
        "clique contrast serializes identically twice",
        first == second,
        format!("{} bytes", first.len()),
    );

    // Lockstep runs issue ids deterministically: colors match across runs.
    // A graph against its own relabeling never separates, so the run is
    // forced through full convergence.
    let g = random_graph(9, 0.4, 91).unwrap();
    let mut rng = SplitMix64::new(0x5eed_0009d);
    let twin = g
        .apply_permutation(&Permutation::random(9, &mut rng))
        .unwrap();
    let a = lockstep_refine(&alg("ktfwl(2,2)"), &[&g, &twin]).unwrap();
    let b = lockstep_refine(&alg("ktfwl(2,2)"), &[&g, &twin]).unwrap();
    let same = a.results[0].coloring.colors() == b.results[0].coloring.colors()
        && a.results[1].coloring.colors() == b.results[1].coloring.colors()
        && a.iterations == b.iterations;
    push(
        &mut checks,
        "lockstep refinement reissues identical colors",
        same && a.converged && a.iterations >= 1,
        format!("{} iterations", a.iterations),
    );

    BatteryOutcome::new("report-determinism", checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_outcome_aggregates_check_failures() {
        let good = Check { label: "a".into(), passed: true, detail: String::new() };
        let bad = Check { label: "b".into(), passed: false, detail: String::new() };
        assert!(BatteryOutcome::new("x", vec![good.clone()]).passed);
        assert!(!BatteryOutcome::new("x", vec![good, bad]).passed);
    }

    #[test]
    fn suite_report_fails_when_any_battery_fails() {
        // The harness contract: one red check turns the whole report red.
        let red = BatteryOutcome::new(
            "synthetic",
            vec![Check { label: "broken".into(), passed: false, detail: "injected".into() }],
        );
        let green = battery_classical_baseline();
        let report = SuiteReport {
            tool: "wl",
            version: "test",
            level: "desk",
            passed: [&green, &red].iter().all(|b| b.passed),
            batteries: vec![green, red],
        };
        assert!(!report.passed);
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"passed\":false"));
    }
}
