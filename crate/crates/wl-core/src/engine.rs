//! Fixed-point color refinement over node tuples.
//!
//! One engine drives every algorithm variant. A run colors all k-tuples of
//! one or more graphs in lockstep against a single shared interner, so colors
//! are comparable across graphs; per-iteration histograms then decide
//! distinguishing verdicts.
//!
//! Iteration layout: workers stage raw aggregates (color ids only, no
//! interner access) in parallel over tuples; a sequential merge interns
//! substructures in fixed tuple order; finally the distinct `(previous,
//! aggregate)` pairs are sorted and issued fresh ids in canonical-code order.
//! Verdicts are therefore independent of worker count and scheduling.
//!
//! Convergence compares partitions, not raw ids (ids are reissued every
//! round): the joint partition is stable when the number of distinct colors
//! across all graphs stops growing. Because each new color encodes the
//! previous one, partitions only ever refine, distinct counts never decrease,
//! and histograms that differ once stay different — the engine may stop at
//! the first mismatch.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algorithm::{Algorithm, AlgorithmSpec, SpecError};
use crate::es::EquivariantSetSpec;
use crate::graph::{Graph, Node};
use crate::interner::{atomic_code, multiset_code, pair_code, tuple_code, ColorId, ColorInterner};
use crate::ktfwl::{encode_level, NeighborhoodPattern, Slot};

/// Upper bound on `n^k` per graph; keeps tuple arrays addressable.
const TUPLE_BUDGET: u64 = 1 << 24;

/// Below this many tuples, staging runs on the calling thread; rayon
/// dispatch costs more than it saves on tiny graphs. Results are identical
/// either way.
const PARALLEL_THRESHOLD: usize = 4096;

static RUN_COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("iteration cap {cap} exceeded before convergence")]
    CapExceeded {
        cap: usize,
        result: Box<RefinementResult>,
    },
    #[error("results come from different refinement runs and are not comparable")]
    ProvenanceMismatch,
}

/// Dense coloring of `V(G)^k`, row-major (first coordinate most significant).
#[derive(Debug, Clone)]
pub struct TupleColoring {
    arity: usize,
    n: usize,
    colors: Vec<ColorId>,
}

impl TupleColoring {
    fn new(arity: usize, n: usize, colors: Vec<ColorId>) -> Self {
        debug_assert_eq!(colors.len(), n.pow(arity as u32));
        TupleColoring { arity, n, colors }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of tuples, `n^k`.
    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn index_of(&self, tuple: &[Node]) -> usize {
        debug_assert_eq!(tuple.len(), self.arity);
        let mut idx = 0usize;
        for &v in tuple {
            debug_assert!(v < self.n);
            idx = idx * self.n + v;
        }
        idx
    }

    pub fn tuple_at(&self, mut idx: usize) -> Vec<Node> {
        let mut tuple = vec![0; self.arity];
        for slot in (0..self.arity).rev() {
            tuple[slot] = idx % self.n;
            idx /= self.n;
        }
        tuple
    }

    pub fn get(&self, tuple: &[Node]) -> ColorId {
        self.colors[self.index_of(tuple)]
    }

    pub fn get_index(&self, idx: usize) -> ColorId {
        self.colors[idx]
    }

    pub fn colors(&self) -> &[ColorId] {
        &self.colors
    }

    pub fn distinct_count(&self) -> usize {
        self.colors.iter().collect::<HashSet<_>>().len()
    }

    /// Colors renamed to first-occurrence ranks; equal vectors mean equal
    /// partitions regardless of which run issued the ids.
    pub fn canonical_partition(&self) -> Vec<u32> {
        let mut rank: HashMap<ColorId, u32> = HashMap::new();
        self.colors
            .iter()
            .map(|c| {
                let next = rank.len() as u32;
                *rank.entry(*c).or_insert(next)
            })
            .collect()
    }

    /// Sorted `(color, multiplicity)` pairs over all tuples.
    pub fn histogram(&self) -> Vec<(ColorId, usize)> {
        let mut counts: HashMap<ColorId, usize> = HashMap::new();
        for c in &self.colors {
            *counts.entry(*c).or_insert(0) += 1;
        }
        let mut hist: Vec<(ColorId, usize)> = counts.into_iter().collect();
        hist.sort_unstable();
        hist
    }
}

/// Stable coloring of one graph together with run metadata.
#[derive(Debug)]
pub struct RefinementResult {
    pub algorithm: Algorithm,
    /// Identifies the shared-interner run that produced this result;
    /// histograms are only comparable within one run.
    pub run_id: u64,
    pub coloring: TupleColoring,
    /// Update rounds executed.
    pub iterations: usize,
    pub converged: bool,
    pub histogram: Vec<(ColorId, usize)>,
    /// Distinct color count after each round, starting with the initial
    /// coloring; non-decreasing by construction.
    pub class_counts: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct RefinementReport {
    pub algorithm: String,
    pub iterations: usize,
    pub histogram: Vec<(u32, usize)>,
    pub converged: bool,
}

impl RefinementResult {
    pub fn report(&self) -> RefinementReport {
        RefinementReport {
            algorithm: self.algorithm.to_string(),
            iterations: self.iterations,
            histogram: self.histogram.iter().map(|&(c, m)| (c.0, m)).collect(),
            converged: self.converged,
        }
    }
}

/// `true` when both results carry identical sorted histograms. Errors if the
/// results were produced by different runs (their ids live in different
/// interners).
pub fn histogram_equal(a: &RefinementResult, b: &RefinementResult) -> Result<bool, EngineError> {
    if a.run_id != b.run_id {
        return Err(EngineError::ProvenanceMismatch);
    }
    Ok(a.histogram == b.histogram)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    /// Histograms first differed after this many update rounds (0 = initial
    /// colors already differ).
    Distinguished { at_iteration: usize },
    /// Joint refinement reached a stable partition with equal histograms.
    Equivalent { iterations: usize },
    /// Iteration cap hit before stability; no verdict.
    Inconclusive { cap: usize },
}

/// Outcome of refining several graphs in lockstep under one interner.
#[derive(Debug)]
pub struct LockstepRun {
    pub run_id: u64,
    pub results: Vec<RefinementResult>,
    pub iterations: usize,
    pub converged: bool,
    pub cap: usize,
    graph_count: usize,
    /// Round at which each pair (upper triangle) first got different
    /// histograms.
    separated: Vec<Option<usize>>,
}

impl LockstepRun {
    fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.graph_count);
        // Position of (i, j) in row-major upper-triangle order.
        i * self.graph_count - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn verdict(&self, i: usize, j: usize) -> Verdict {
        let (i, j) = (i.min(j), i.max(j));
        match self.separated[self.pair_index(i, j)] {
            Some(at) => Verdict::Distinguished { at_iteration: at },
            None if self.converged => Verdict::Equivalent {
                iterations: self.iterations,
            },
            None => Verdict::Inconclusive { cap: self.cap },
        }
    }
}

/// Refines a single graph to its stable coloring.
pub fn refine(spec: &AlgorithmSpec, g: &Graph) -> Result<RefinementResult, EngineError> {
    let mut run = lockstep_refine(spec, &[g])?;
    let result = run.results.pop().expect("one result per graph");
    if !result.converged {
        return Err(EngineError::CapExceeded {
            cap: run.cap,
            result: Box::new(result),
        });
    }
    Ok(result)
}

/// Runs both graphs in lockstep and reports the first histogram mismatch,
/// equivalence at joint stability, or an inconclusive cap hit.
pub fn joint_distinguish(
    spec: &AlgorithmSpec,
    g: &Graph,
    h: &Graph,
) -> Result<Verdict, EngineError> {
    let run = lockstep_refine(spec, &[g, h])?;
    Ok(run.verdict(0, 1))
}

/// Which update rule to stage; derived once per run from the algorithm.
enum Rule {
    OneWl,
    KWl {
        k: usize,
    },
    KFwl {
        k: usize,
    },
    /// Shared path for plain and equivariant-set tuple refinement; plain
    /// (k,t) refinement is the `V(G)^t` instance.
    TupleFwl {
        k: usize,
        t: usize,
        es: EquivariantSetSpec,
        pattern: NeighborhoodPattern,
    },
}

impl Rule {
    fn for_algorithm(alg: &Algorithm) -> Rule {
        match alg {
            Algorithm::OneWl => Rule::OneWl,
            Algorithm::KWl { k } => Rule::KWl { k: *k },
            Algorithm::KFwl { k } => Rule::KFwl { k: *k },
            Algorithm::KtFwl { k, t } => Rule::tuple(*k, *t, EquivariantSetSpec::global(*t)),
            Algorithm::KtFwlPlus { k, t, es } => Rule::tuple(*k, *t, es.clone()),
            Algorithm::N2Fwl { h } => Rule::tuple(2, 2, EquivariantSetSpec::n2(*h)),
        }
    }

    fn tuple(k: usize, t: usize, es: EquivariantSetSpec) -> Rule {
        let pattern = NeighborhoodPattern::new(k, t).expect("validated arities");
        Rule::TupleFwl { k, t, es, pattern }
    }
}

/// Raw aggregate staged by a worker for one tuple; nothing interned yet.
enum Staged {
    /// Multiset-to-be of neighbor colors.
    Neighbors(Vec<ColorId>),
    /// One multiset-to-be per substituted position.
    PerPosition(Vec<Vec<ColorId>>),
    /// Flat member rows, `row_len` colors each, one row per replacement node.
    Members { rows: Vec<ColorId>, row_len: usize },
    /// Member rows plus the t-tuple key of each row for hierarchical
    /// grouping; rows arrive keyed in reverse-major order (last coordinate
    /// slowest), which is exactly the grouping order.
    Grouped {
        rows: Vec<ColorId>,
        row_len: usize,
        keys: Vec<Node>,
        t: usize,
    },
}

fn stage_tuple(rule: &Rule, g: &Graph, prev: &TupleColoring, idx: usize) -> Staged {
    let n = g.node_count();
    match rule {
        Rule::OneWl => Staged::Neighbors(
            g.neighbors(idx)
                .iter()
                .map(|&u| prev.get_index(u))
                .collect(),
        ),
        Rule::KWl { k } => {
            let tuple = prev.tuple_at(idx);
            let mut multisets = Vec::with_capacity(*k);
            let mut stride = n.pow(*k as u32 - 1);
            for &entry in &tuple {
                let base = idx - entry * stride;
                multisets.push((0..n).map(|w| prev.get_index(base + w * stride)).collect());
                stride /= n;
            }
            Staged::PerPosition(multisets)
        }
        Rule::KFwl { k } => {
            let tuple = prev.tuple_at(idx);
            let mut strides = Vec::with_capacity(*k);
            let mut stride = n.pow(*k as u32 - 1);
            let mut bases = Vec::with_capacity(*k);
            for &entry in &tuple {
                strides.push(stride);
                bases.push(idx - entry * stride);
                stride /= n;
            }
            let mut rows = Vec::with_capacity(n * k);
            for w in 0..n {
                for (base, stride) in bases.iter().zip(&strides) {
                    rows.push(prev.get_index(base + w * stride));
                }
            }
            Staged::Members { rows, row_len: *k }
        }
        Rule::TupleFwl { k, t, es, pattern } => {
            let tuple = prev.tuple_at(idx);
            let sets = es.coordinate_sets(g, &tuple);
            let lens: Vec<usize> = sets.iter().map(Vec::len).collect();
            let total: usize = lens.iter().product();
            let row_len = pattern.len();

            // Anchor contributions are constant per row; replacements vary.
            let mut tuple_stride = vec![0usize; *k];
            let mut s = n.pow(*k as u32 - 1);
            for stride in tuple_stride.iter_mut() {
                *stride = s;
                s /= n;
            }
            let mut base = Vec::with_capacity(row_len);
            let mut subs: Vec<Vec<(usize, usize)>> = Vec::with_capacity(row_len);
            for row in pattern.rows() {
                let mut b = 0usize;
                let mut repl = Vec::new();
                for (slot, &stride) in row.iter().zip(&tuple_stride) {
                    match slot {
                        Slot::Anchor(i) => b += tuple[*i] * stride,
                        Slot::Replacement(j) => repl.push((*j, stride)),
                    }
                }
                base.push(b);
                subs.push(repl);
            }

            // Mixed-radix walk with the first coordinate fastest gives the
            // reverse-major (last coordinate outermost) enumeration.
            let mut key_stride = vec![0usize; *t];
            let mut acc = 1usize;
            for (pos, len) in lens.iter().enumerate() {
                key_stride[pos] = acc;
                acc *= len;
            }

            let mut rows = Vec::with_capacity(total * row_len);
            let mut keys = Vec::with_capacity(total * t);
            let mut w = vec![0usize; *t];
            for c in 0..total {
                for pos in 0..*t {
                    w[pos] = sets[pos][(c / key_stride[pos]) % lens[pos]];
                }
                keys.extend_from_slice(&w);
                for (b, repl) in base.iter().zip(&subs) {
                    let mut member_idx = *b;
                    for &(j, stride) in repl {
                        member_idx += w[j] * stride;
                    }
                    rows.push(prev.get_index(member_idx));
                }
            }
            Staged::Grouped {
                rows,
                row_len,
                keys,
                t: *t,
            }
        }
    }
}

/// Interns one staged aggregate, returning `(previous, aggregate)` ids.
fn merge_tuple(
    staged: Staged,
    prev_id: ColorId,
    interner: &mut ColorInterner,
    buf: &mut Vec<u8>,
) -> (u32, u32) {
    let agg = match staged {
        Staged::Neighbors(mut ids) => {
            multiset_code(buf, &mut ids);
            interner.intern(buf)
        }
        Staged::PerPosition(multisets) => {
            let position_ids: Vec<ColorId> = multisets
                .into_iter()
                .map(|mut ids| {
                    multiset_code(buf, &mut ids);
                    interner.intern(buf)
                })
                .collect();
            tuple_code(buf, &position_ids);
            interner.intern(buf)
        }
        Staged::Members { rows, row_len } => {
            let mut member_ids: Vec<ColorId> = rows
                .chunks_exact(row_len)
                .map(|row| {
                    tuple_code(buf, row);
                    interner.intern(buf)
                })
                .collect();
            multiset_code(buf, &mut member_ids);
            interner.intern(buf)
        }
        Staged::Grouped {
            rows,
            row_len,
            keys,
            t,
        } => {
            let member_ids: Vec<ColorId> = rows
                .chunks_exact(row_len)
                .map(|row| {
                    tuple_code(buf, row);
                    interner.intern(buf)
                })
                .collect();
            let members: Vec<(&[Node], ColorId)> = keys.chunks_exact(t).zip(member_ids).collect();
            encode_level(interner, &members, t)
        }
    };
    (prev_id.0, agg.0)
}

/// Refines every graph in lockstep under one shared interner.
///
/// Stops at joint stability, at the iteration cap, or — when at least two
/// graphs are present — as soon as every pair of graphs has distinct
/// histograms (separated pairs can never re-merge, so nothing further can
/// change any verdict).
pub fn lockstep_refine(
    spec: &AlgorithmSpec,
    graphs: &[&Graph],
) -> Result<LockstepRun, EngineError> {
    spec.algorithm.validate()?;
    let k = spec.algorithm.arity();
    for g in graphs {
        let tuples = (g.node_count() as u64).pow(k as u32);
        if tuples > TUPLE_BUDGET {
            return Err(SpecError::TupleSpaceTooLarge {
                tuples,
                budget: TUPLE_BUDGET,
            }
            .into());
        }
    }
    let rule = Rule::for_algorithm(&spec.algorithm);
    let run_id = RUN_COUNTER.fetch_add(1, Ordering::Relaxed);
    let max_n = graphs.iter().map(|g| g.node_count()).max().unwrap_or(0);
    let cap = spec.effective_cap(max_n);
    let graph_count = graphs.len();

    let mut interner = ColorInterner::new();
    let mut colorings = initial_colorings(k, graphs, &mut interner);

    let mut class_counts: Vec<Vec<usize>> =
        colorings.iter().map(|c| vec![c.distinct_count()]).collect();
    let mut joint_distinct = joint_distinct_count(&colorings);

    let mut separated: Vec<Option<usize>> =
        vec![None; graph_count * graph_count.saturating_sub(1) / 2];
    let mut groups = vec![0usize; graph_count];
    regroup(&colorings, &mut groups, &mut separated, 0, graph_count);

    let mut iterations = 0usize;
    let mut converged = false;

    while iterations < cap {
        // Separated pairs can never re-merge, so once every pair is
        // separated no further round can change any verdict.
        if graph_count >= 2 && all_singleton(&groups) {
            break;
        }
        let round = iterations + 1;

        // Stage in parallel, then intern sequentially in fixed tuple order.
        // Intermediate aggregate codes live in a per-round scratch interner:
        // they are only compared within the round, and new tuple colors are
        // distinct across rounds anyway because each embeds the previous
        // color, whose ids no earlier round has issued.
        let mut scratch = ColorInterner::new();
        let mut pair_keys: Vec<Vec<(u32, u32)>> = Vec::with_capacity(graph_count);
        {
            let mut buf = Vec::new();
            for (g, coloring) in graphs.iter().zip(&colorings) {
                let staged: Vec<Staged> = if coloring.len() >= PARALLEL_THRESHOLD {
                    (0..coloring.len())
                        .into_par_iter()
                        .map(|idx| stage_tuple(&rule, g, coloring, idx))
                        .collect()
                } else {
                    (0..coloring.len())
                        .map(|idx| stage_tuple(&rule, g, coloring, idx))
                        .collect()
                };
                let keys: Vec<(u32, u32)> = staged
                    .into_iter()
                    .enumerate()
                    .map(|(idx, s)| merge_tuple(s, coloring.get_index(idx), &mut scratch, &mut buf))
                    .collect();
                pair_keys.push(keys);
            }
        }

        // Fresh ids for this round, assigned in canonical-code order.
        let distinct: BTreeSet<(u32, u32)> = pair_keys.iter().flatten().copied().collect();
        let mut buf = Vec::new();
        let mut new_ids: HashMap<(u32, u32), ColorId> = HashMap::with_capacity(distinct.len());
        for &(prev, agg) in &distinct {
            pair_code(&mut buf, ColorId(prev), ColorId(agg));
            new_ids.insert((prev, agg), interner.intern(&buf));
        }
        for (coloring, keys) in colorings.iter_mut().zip(&pair_keys) {
            let colors: Vec<ColorId> = keys.iter().map(|key| new_ids[key]).collect();
            *coloring = TupleColoring::new(k, coloring.node_count(), colors);
        }

        iterations = round;
        for (counts, coloring) in class_counts.iter_mut().zip(&colorings) {
            counts.push(coloring.distinct_count());
        }
        regroup(&colorings, &mut groups, &mut separated, round, graph_count);

        let new_joint_distinct = joint_distinct_count(&colorings);
        if new_joint_distinct == joint_distinct {
            converged = true;
            break;
        }
        joint_distinct = new_joint_distinct;
    }

    let results = colorings
        .into_iter()
        .zip(class_counts)
        .map(|(coloring, counts)| {
            let histogram = coloring.histogram();
            RefinementResult {
                algorithm: spec.algorithm.clone(),
                run_id,
                coloring,
                iterations,
                converged,
                histogram,
                class_counts: counts,
            }
        })
        .collect();

    Ok(LockstepRun {
        run_id,
        results,
        iterations,
        converged,
        cap,
        graph_count,
        separated,
    })
}

fn initial_colorings(
    k: usize,
    graphs: &[&Graph],
    interner: &mut ColorInterner,
) -> Vec<TupleColoring> {
    // Atomic-type codes staged in parallel, interned in sorted order.
    let stage_one = |g: &Graph, idx: usize| {
        let n = g.node_count();
        let mut tuple = vec![0usize; k];
        let mut rest = idx;
        for slot in (0..k).rev() {
            tuple[slot] = rest % n;
            rest /= n;
        }
        let mut buf = Vec::new();
        atomic_code(&mut buf, g, &tuple);
        buf
    };
    let staged: Vec<Vec<Vec<u8>>> = graphs
        .iter()
        .map(|g| {
            let len = g.node_count().pow(k as u32);
            if len >= PARALLEL_THRESHOLD {
                (0..len)
                    .into_par_iter()
                    .map(|idx| stage_one(g, idx))
                    .collect()
            } else {
                (0..len).map(|idx| stage_one(g, idx)).collect()
            }
        })
        .collect();

    let distinct: BTreeSet<&[u8]> = staged.iter().flatten().map(Vec::as_slice).collect();
    for code in distinct {
        interner.intern(code);
    }
    graphs
        .iter()
        .zip(staged)
        .map(|(g, codes)| {
            let colors = codes
                .iter()
                .map(|c| interner.get(c).expect("just interned"))
                .collect();
            TupleColoring::new(k, g.node_count(), colors)
        })
        .collect()
}

fn joint_distinct_count(colorings: &[TupleColoring]) -> usize {
    let mut seen: HashSet<ColorId> = HashSet::new();
    for c in colorings {
        seen.extend(c.colors().iter().copied());
    }
    seen.len()
}

/// Splits histogram groups and records first separations at `round`.
/// Group keys include the previous group so groups only ever split.
fn regroup(
    colorings: &[TupleColoring],
    groups: &mut [usize],
    separated: &mut [Option<usize>],
    round: usize,
    graph_count: usize,
) {
    let mut key_to_group: HashMap<(usize, Vec<(ColorId, usize)>), usize> = HashMap::new();
    let new_groups: Vec<usize> = colorings
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let key = (groups[i], c.histogram());
            let next = key_to_group.len();
            *key_to_group.entry(key).or_insert(next)
        })
        .collect();
    let mut pair = 0usize;
    for i in 0..graph_count {
        for j in i + 1..graph_count {
            if separated[pair].is_none() && new_groups[i] != new_groups[j] {
                separated[pair] = Some(round);
            }
            pair += 1;
        }
    }
    groups.copy_from_slice(&new_groups);
}

fn all_singleton(groups: &[usize]) -> bool {
    let mut seen = HashSet::new();
    groups.iter().all(|g| seen.insert(*g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Permutation;

    fn c6() -> Graph {
        Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]).unwrap()
    }

    fn two_triangles() -> Graph {
        Graph::new(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    fn spec(s: &str) -> AlgorithmSpec {
        AlgorithmSpec::new(s.parse().unwrap())
    }

    #[test]
    fn one_wl_on_regular_graph_converges_immediately() {
        // Colors never split on an uncolored regular graph.
        for g in [c6(), two_triangles()] {
            let result = refine(&spec("1wl"), &g).unwrap();
            assert!(result.converged);
            assert_eq!(result.iterations, 1);
            assert_eq!(result.histogram.len(), 1);
            assert_eq!(result.histogram[0].1, 6);
        }
    }

    #[test]
    fn one_wl_cannot_split_c6_from_triangles() {
        let verdict = joint_distinguish(&spec("1wl"), &c6(), &two_triangles()).unwrap();
        assert!(matches!(verdict, Verdict::Equivalent { .. }));
    }

    #[test]
    fn two_fwl_splits_c6_from_triangles() {
        // Adjacent pairs in the triangle graph have a common neighbor; in C6
        // they do not. The folklore aggregation sees this in round one.
        let verdict = joint_distinguish(&spec("kfwl(2)"), &c6(), &two_triangles()).unwrap();
        assert_eq!(verdict, Verdict::Distinguished { at_iteration: 1 });
    }

    #[test]
    fn two_fwl_stable_coloring_tracks_distance_on_c6() {
        let g = c6();
        let result = refine(&spec("kfwl(2)"), &g).unwrap();
        let mut class_distance: HashMap<ColorId, u32> = HashMap::new();
        for u in 0..6 {
            for v in 0..6 {
                let color = result.coloring.get(&[u, v]);
                let d = g.spd(u, v);
                if let Some(prev) = class_distance.insert(color, d) {
                    assert_eq!(prev, d, "tuples at different distances share a color");
                }
            }
        }
        assert!(result.histogram.len() >= 4);
    }

    #[test]
    fn histograms_sum_to_tuple_count() {
        let result = refine(&spec("kfwl(2)"), &c6()).unwrap();
        let total: usize = result.histogram.iter().map(|&(_, m)| m).sum();
        assert_eq!(total, 36);
        let result = refine(&spec("1wl"), &c6()).unwrap();
        let total: usize = result.histogram.iter().map(|&(_, m)| m).sum();
        assert_eq!(total, 6);
    }

    #[test]
    fn class_counts_never_decrease() {
        for s in ["1wl", "kwl(2)", "kfwl(2)", "ktfwl(2,2)", "n2fwl(h=1)"] {
            let result = refine(&spec(s), &two_triangles()).unwrap();
            for w in result.class_counts.windows(2) {
                assert!(w[0] <= w[1], "{s}: partition coarsened");
            }
        }
    }

    #[test]
    fn permuted_graph_is_equivalent_under_every_rule() {
        let g = Graph::new(
            7,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 0),
                (0, 3),
                (2, 5),
            ],
        )
        .unwrap();
        let p = Permutation::from_vec(vec![3, 6, 0, 5, 2, 4, 1]).unwrap();
        let gp = g.apply_permutation(&p).unwrap();
        for s in [
            "1wl",
            "kwl(2)",
            "kfwl(2)",
            "ktfwl(2,1)",
            "ktfwl(2,2)",
            "n2fwl(h=1)",
            "n2fwl(h=inf)",
        ] {
            let verdict = joint_distinguish(&spec(s), &g, &gp).unwrap();
            assert!(
                matches!(verdict, Verdict::Equivalent { .. }),
                "{s} split a graph from its relabeling"
            );
        }
    }

    #[test]
    fn ktfwl_t1_matches_kfwl_partitions() {
        let g = Graph::new(
            8,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 0),
                (4, 5),
                (5, 6),
                (6, 7),
                (7, 4),
                (0, 4),
                (2, 6),
            ],
        )
        .unwrap();
        let a = refine(&spec("ktfwl(2,1)"), &g).unwrap();
        let b = refine(&spec("kfwl(2)"), &g).unwrap();
        assert_eq!(
            a.coloring.canonical_partition(),
            b.coloring.canonical_partition()
        );
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn convergence_respects_theoretical_bound() {
        let g = Graph::new(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6)]).unwrap();
        let result = refine(&spec("1wl"), &g).unwrap();
        assert!(result.iterations <= 7);
        let result = refine(&spec("kfwl(2)"), &g).unwrap();
        assert!(result.iterations <= 49);
    }

    #[test]
    fn cap_exhaustion_reports_last_coloring() {
        let g = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let err = refine(&AlgorithmSpec::with_cap("1wl".parse().unwrap(), 1), &g).unwrap_err();
        match err {
            EngineError::CapExceeded { cap, result } => {
                assert_eq!(cap, 1);
                assert!(!result.converged);
                assert_eq!(result.coloring.len(), 5);
            }
            other => panic!("unexpected error {other:?}"),
        }
        let verdict = joint_distinguish(
            &AlgorithmSpec::with_cap("1wl".parse().unwrap(), 1),
            &g,
            &g.clone(),
        )
        .unwrap();
        assert_eq!(verdict, Verdict::Inconclusive { cap: 1 });
    }

    #[test]
    fn provenance_mismatch_is_rejected() {
        let a = refine(&spec("1wl"), &c6()).unwrap();
        let b = refine(&spec("1wl"), &c6()).unwrap();
        assert!(matches!(
            histogram_equal(&a, &b),
            Err(EngineError::ProvenanceMismatch)
        ));
        let run = lockstep_refine(&spec("1wl"), &[&c6(), &c6()]).unwrap();
        assert!(histogram_equal(&run.results[0], &run.results[1]).unwrap());
    }

    #[test]
    fn size_mismatch_distinguishes_at_iteration_zero() {
        let g = c6();
        let h = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let verdict = joint_distinguish(&spec("1wl"), &g, &h).unwrap();
        assert_eq!(verdict, Verdict::Distinguished { at_iteration: 0 });
    }

    #[test]
    fn plain_pair_refinement_matches_node_refinement_power() {
        // The non-folklore 2-tuple rule adds no power over node refinement,
        // while the 3-tuple rule already separates the classical pair.
        let v = joint_distinguish(&spec("kwl(2)"), &c6(), &two_triangles()).unwrap();
        assert!(matches!(v, Verdict::Equivalent { .. }));
        let v = joint_distinguish(&spec("kwl(3)"), &c6(), &two_triangles()).unwrap();
        assert!(matches!(v, Verdict::Distinguished { .. }));
    }

    #[test]
    fn stable_pair_colors_never_mix_distances() {
        // Distance between tuple entries is a lower bound on what the
        // folklore pair rule resolves: check on a random battery.
        for seed in 0..10u64 {
            let g = crate::generators::random_graph(9, 0.3, seed).unwrap();
            let result = refine(&spec("kfwl(2)"), &g).unwrap();
            let mut class_distance: HashMap<ColorId, u32> = HashMap::new();
            for u in 0..9 {
                for v in 0..9 {
                    let color = result.coloring.get(&[u, v]);
                    let d = g.spd(u, v);
                    if let Some(prev) = class_distance.insert(color, d) {
                        assert_eq!(
                            prev, d,
                            "seed {seed}: distances {prev} and {d} share a color"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn srg_pair_histograms_split_only_under_n2() {
        let pair = crate::generators::srg_pair();
        let run = lockstep_refine(&spec("kfwl(2)"), &[&pair.shrikhande, &pair.rook]).unwrap();
        assert!(histogram_equal(&run.results[0], &run.results[1]).unwrap());
        let run = lockstep_refine(&spec("n2fwl(h=1)"), &[&pair.shrikhande, &pair.rook]).unwrap();
        assert!(!histogram_equal(&run.results[0], &run.results[1]).unwrap());
    }

    #[test]
    fn node_colors_feed_the_initial_coloring() {
        // Same structure, different labels: separated before any update.
        let plain = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let tinted = Graph::with_colors(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], &[1, 0, 0, 0]).unwrap();
        for s in ["1wl", "kfwl(2)"] {
            let v = joint_distinguish(&spec(s), &plain, &tinted).unwrap();
            assert_eq!(v, Verdict::Distinguished { at_iteration: 0 }, "{s}");
        }
        // Refinement on the tinted ring resolves distance-to-mark classes.
        let result = refine(&spec("1wl"), &tinted).unwrap();
        assert_eq!(result.histogram.len(), 3);
        // And a recolored relabeling stays equivalent.
        let p = Permutation::from_vec(vec![2, 3, 0, 1]).unwrap();
        let moved = tinted.apply_permutation(&p).unwrap();
        let v = joint_distinguish(&spec("kfwl(2)"), &tinted, &moved).unwrap();
        assert!(matches!(v, Verdict::Equivalent { .. }));
    }

    #[test]
    fn interned_codes_stay_bijective_through_a_run() {
        // Exhaustive injectivity check over ids that reach a result: every
        // histogram color resolves to a code that interns back to itself.
        let g = crate::generators::random_graph(8, 0.4, 17).unwrap();
        let result = refine(&spec("ktfwl(2,2)"), &g).unwrap();
        let mut interner = ColorInterner::new();
        let mut codes: Vec<Vec<u8>> = Vec::new();
        for idx in 0..result.coloring.len() {
            let mut buf = Vec::new();
            atomic_code(&mut buf, &g, &result.coloring.tuple_at(idx));
            codes.push(buf);
        }
        let ids: Vec<ColorId> = codes.iter().map(|c| interner.intern(c)).collect();
        for (code, id) in codes.iter().zip(&ids) {
            assert_eq!(interner.lookup(*id), Some(code.as_slice()));
            assert_eq!(interner.intern(code), *id);
        }
        // Distinct codes got distinct ids and vice versa.
        let distinct_codes = codes.iter().collect::<HashSet<_>>().len();
        let distinct_ids = ids.iter().collect::<HashSet<_>>().len();
        assert_eq!(distinct_codes, distinct_ids);
    }

    #[test]
    fn results_are_independent_of_thread_count() {
        let g = Graph::new(
            9,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 7),
                (7, 8),
                (8, 0),
                (0, 4),
                (2, 7),
            ],
        )
        .unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| refine(&spec("ktfwl(2,2)"), &g).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.histogram, b.histogram);
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.coloring.colors(), b.coloring.colors());
    }
}
