//! Neighborhood tuples, hierarchical multisets, and the generalized tuple
//! update rule.
//!
//! The neighborhood tuple of a k-tuple `v` and a t-tuple `w` enumerates, for
//! each `m` from 0 to `min(k, t)`, every way of substituting an
//! index-ascending m-subsequence of `w` into `v` at an ascending m-subset of
//! positions. Its length is the sum over m of `C(k,m) * C(t,m)`.
//!
//! Enumeration order is a free convention as long as it is a fixed function
//! of `(k, t)`; every choice yields the same partitions because the index
//! mapping from output positions to `(v, w)` slots is shared by all tuples.
//! We fix: blocks in ascending `m`; within a block, position subsets in
//! descending lexicographic order (outer) and `w`-subsequences in ascending
//! lexicographic order (inner). For `k = t = 2` this yields exactly
//! `((v1,v2), (v1,w1), (v1,w2), (w1,v2), (w2,v2), (w1,w2))`.

use thiserror::Error;

use crate::engine::TupleColoring;
use crate::es::{EquivariantSetSpec, Hops};
use crate::graph::{Graph, Node};
use crate::interner::{multiset_code, pair_code, tuple_code, ColorId, ColorInterner};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KtError {
    #[error("tuples must be non-empty (k = {k}, t = {t})")]
    EmptyTuple { k: usize, t: usize },
    #[error("member tuple has arity {got}, expected {expected}")]
    ArityMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Es(#[from] crate::es::EsError),
}

/// Where each slot of a substituted tuple comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// Keep coordinate `i` of the anchor k-tuple.
    Anchor(usize),
    /// Take coordinate `j` of the replacement t-tuple.
    Replacement(usize),
}

/// The substitution pattern behind every neighborhood tuple for fixed
/// `(k, t)`: one row of k slots per output position. The pattern depends
/// only on `(k, t)`, which is what makes positions comparable across
/// different anchors — and across graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodPattern {
    k: usize,
    t: usize,
    rows: Vec<Vec<Slot>>,
}

impl NeighborhoodPattern {
    pub fn new(k: usize, t: usize) -> Result<Self, KtError> {
        if k == 0 || t == 0 {
            return Err(KtError::EmptyTuple { k, t });
        }
        let mut rows = Vec::new();
        for m in 0..=k.min(t) {
            let mut position_subsets = combinations(k, m);
            position_subsets.reverse();
            let replacement_subsets = combinations(t, m);
            for positions in &position_subsets {
                for replacements in &replacement_subsets {
                    let mut row: Vec<Slot> = (0..k).map(Slot::Anchor).collect();
                    for (pos, rep) in positions.iter().zip(replacements) {
                        row[*pos] = Slot::Replacement(*rep);
                    }
                    rows.push(row);
                }
            }
        }
        Ok(NeighborhoodPattern { k, t, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<Slot>] {
        &self.rows
    }

    /// Instantiates the pattern for concrete `(v, w)`.
    pub fn apply(&self, v: &[Node], w: &[Node]) -> Vec<Vec<Node>> {
        debug_assert_eq!(v.len(), self.k);
        debug_assert_eq!(w.len(), self.t);
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|slot| match slot {
                        Slot::Anchor(i) => v[*i],
                        Slot::Replacement(j) => w[*j],
                    })
                    .collect()
            })
            .collect()
    }
}

/// Ascending m-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(m);
    fn rec(n: usize, m: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == m {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(n, m, i + 1, current, out);
            current.pop();
        }
    }
    rec(n, m, 0, &mut current, &mut out);
    out
}

/// The ordered sequence of all substituted k-tuples for `(v, w)`.
pub fn neighborhood_tuple(v: &[Node], w: &[Node]) -> Result<Vec<Vec<Node>>, KtError> {
    let pattern = NeighborhoodPattern::new(v.len(), w.len())?;
    Ok(pattern.apply(v, w))
}

/// Encodes a collection of `(t-tuple key, member color)` pairs as a
/// hierarchical multiset: members sharing all but the first key coordinate
/// form the innermost multisets; each further level groups by the next
/// coordinate, ending with the last. At `t = 1` this is the plain multiset.
///
/// The result is invariant under member reorderings that respect the
/// grouping, and nothing else: exchanging the colors of two members whose
/// keys differ in a grouped coordinate changes the code.
pub fn hierarchical_encode(
    interner: &mut ColorInterner,
    members: &[(Vec<Node>, ColorId)],
    t: usize,
) -> Result<ColorId, KtError> {
    for (key, _) in members {
        if key.len() != t {
            return Err(KtError::ArityMismatch {
                got: key.len(),
                expected: t,
            });
        }
    }
    let mut sorted: Vec<(&[Node], ColorId)> =
        members.iter().map(|(k, c)| (k.as_slice(), *c)).collect();
    // Grouping wants the last coordinate outermost.
    sorted.sort_by(|a, b| a.0.iter().rev().cmp(b.0.iter().rev()));
    Ok(encode_level(interner, &sorted, t))
}

/// `members` must be sorted by reversed key. `depth` counts the key
/// coordinates still ungrouped; at depth 1 only the first coordinate varies
/// within the slice, so the member colors form one multiset.
pub(crate) fn encode_level(
    interner: &mut ColorInterner,
    members: &[(&[Node], ColorId)],
    depth: usize,
) -> ColorId {
    let mut buf = Vec::new();
    if depth <= 1 {
        let mut ids: Vec<ColorId> = members.iter().map(|(_, c)| *c).collect();
        multiset_code(&mut buf, &mut ids);
        return interner.intern(&buf);
    }
    let mut group_ids: Vec<ColorId> = Vec::new();
    let mut start = 0;
    while start < members.len() {
        let coord = members[start].0[depth - 1];
        let mut end = start + 1;
        while end < members.len() && members[end].0[depth - 1] == coord {
            end += 1;
        }
        group_ids.push(encode_level(interner, &members[start..end], depth - 1));
        start = end;
    }
    multiset_code(&mut buf, &mut group_ids);
    interner.intern(&buf)
}

/// One tuple-color update: pairs the previous color of `v` with the
/// hierarchical multiset, over all `w` in the equivariant set, of the ordered
/// color sequence along the neighborhood tuple of `(v, w)`. An empty
/// equivariant set leaves the tuple refining through its own color only.
pub fn update_tuple_color(
    g: &Graph,
    es: &EquivariantSetSpec,
    prev: &TupleColoring,
    v: &[Node],
    interner: &mut ColorInterner,
) -> Result<ColorId, KtError> {
    let k = v.len();
    let t = es.arity();
    let pattern = NeighborhoodPattern::new(k, t)?;
    es.validate_for(k)?;
    let sets = es.coordinate_sets(g, v);

    let mut members: Vec<(Vec<Node>, ColorId)> = Vec::new();
    let mut w = vec![0usize; t];
    let mut member_ids = Vec::with_capacity(pattern.len());
    let mut buf = Vec::new();
    let mut tup = vec![0usize; k];
    collect_members(
        &pattern,
        &sets,
        prev,
        interner,
        v,
        &mut w,
        0,
        &mut members,
        &mut member_ids,
        &mut buf,
        &mut tup,
    );

    let root = hierarchical_encode(interner, &members, t)?;
    let mut code = Vec::new();
    pair_code(&mut code, prev.get(v), root);
    Ok(interner.intern(&code))
}

#[allow(clippy::too_many_arguments)]
fn collect_members(
    pattern: &NeighborhoodPattern,
    sets: &[Vec<Node>],
    prev: &TupleColoring,
    interner: &mut ColorInterner,
    v: &[Node],
    w: &mut Vec<Node>,
    depth: usize,
    members: &mut Vec<(Vec<Node>, ColorId)>,
    member_ids: &mut Vec<ColorId>,
    buf: &mut Vec<u8>,
    tup: &mut [Node],
) {
    if depth == sets.len() {
        member_ids.clear();
        for row in pattern.rows() {
            for (slot, out) in row.iter().zip(tup.iter_mut()) {
                *out = match slot {
                    Slot::Anchor(i) => v[*i],
                    Slot::Replacement(j) => w[*j],
                };
            }
            member_ids.push(prev.get(tup));
        }
        tuple_code(buf, member_ids);
        members.push((w.clone(), interner.intern(buf)));
        return;
    }
    for &u in &sets[depth] {
        w[depth] = u;
        collect_members(
            pattern,
            sets,
            prev,
            interner,
            v,
            w,
            depth + 1,
            members,
            member_ids,
            buf,
            tup,
        );
    }
}

/// The 2-tuple neighborhood `(N_1(v2) x N_1(v1)) ^ (N_h(v1) ^ N_h(v2))^2`,
/// lexicographically sorted. `h = Infinite` drops the overlap filter.
pub fn n2_neighborhood(g: &Graph, v: (Node, Node), h: Hops) -> Vec<(Node, Node)> {
    EquivariantSetSpec::n2(h)
        .evaluate(g, &[v.0, v.1])
        .expect("pair neighborhood is valid for 2-tuples")
        .into_iter()
        .map(|w| (w[0], w[1]))
        .collect()
}
