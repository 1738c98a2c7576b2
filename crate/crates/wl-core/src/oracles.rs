//! Independent brute-force ground truth: exhaustive isomorphism testing,
//! substructure counting, and distance-two-clique search. Everything here is
//! exact; it exists to validate refinement verdicts, so none of it may share
//! code with the refinement path.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Node};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph with {n} nodes exceeds the exhaustive counting budget of {budget}")]
    BudgetExceeded { n: usize, budget: usize },
}

// ---------------------------------------------------------------------------
// Isomorphism
// ---------------------------------------------------------------------------

/// Exhaustive color- and edge-preserving isomorphism test.
///
/// Backtracking over candidate images, pruned by jointly refined node colors
/// (a necessary condition for any isomorphism, so completeness is
/// preserved). Exhaustive for every input; intended for n <= 12, still exact
/// beyond that, just slower.
pub fn are_isomorphic(g: &Graph, h: &Graph) -> bool {
    let n = g.node_count();
    if n != h.node_count() || g.edge_count() != h.edge_count() {
        return false;
    }
    let mut gc: Vec<u32> = g.colors().to_vec();
    let mut hc: Vec<u32> = h.colors().to_vec();
    gc.sort_unstable();
    hc.sort_unstable();
    if gc != hc || g.degree_sequence() != h.degree_sequence() {
        return false;
    }
    if n == 0 {
        return true;
    }

    let (colors_g, colors_h) = match joint_node_refinement(g, h) {
        Some(pair) => pair,
        None => return false,
    };

    // Assign images for nodes of g in order of ascending candidate-class
    // size; candidates must share the refined color.
    let mut order: Vec<Node> = (0..n).collect();
    let mut class_size = vec![0usize; n];
    for v in 0..n {
        class_size[v] = (0..n).filter(|&u| colors_h[u] == colors_g[v]).count();
    }
    order.sort_by_key(|&v| (class_size[v], v));

    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    backtrack(g, h, &colors_g, &colors_h, &order, 0, &mut image, &mut used)
}

/// One-dimensional color refinement of both graphs under a shared code
/// space. Returns per-node stable classes, or `None` when the class
/// multisets already differ (no isomorphism can exist).
fn joint_node_refinement(g: &Graph, h: &Graph) -> Option<(Vec<u64>, Vec<u64>)> {
    let n = g.node_count();
    let mut cg: Vec<u64> = g.colors().iter().map(|&c| c as u64).collect();
    let mut ch: Vec<u64> = h.colors().iter().map(|&c| c as u64).collect();
    for _ in 0..n {
        let mut codes: Vec<(Vec<u64>, usize, bool)> = Vec::with_capacity(2 * n);
        for v in 0..n {
            let mut sig = vec![cg[v]];
            let mut nb: Vec<u64> = g.neighbors(v).iter().map(|&u| cg[u]).collect();
            nb.sort_unstable();
            sig.extend(nb);
            codes.push((sig, v, false));
        }
        for v in 0..n {
            let mut sig = vec![ch[v]];
            let mut nb: Vec<u64> = h.neighbors(v).iter().map(|&u| ch[u]).collect();
            nb.sort_unstable();
            sig.extend(nb);
            codes.push((sig, v, true));
        }
        codes.sort();
        let mut next_g = vec![0u64; n];
        let mut next_h = vec![0u64; n];
        let mut id = 0u64;
        for i in 0..codes.len() {
            if i > 0 && codes[i].0 != codes[i - 1].0 {
                id += 1;
            }
            let (_, v, in_h) = (&codes[i].0, codes[i].1, codes[i].2);
            if in_h {
                next_h[v] = id;
            } else {
                next_g[v] = id;
            }
        }
        let stable = next_distinct(&next_g, &next_h) == next_distinct(&cg, &ch);
        cg = next_g;
        ch = next_h;
        if stable {
            break;
        }
    }
    let mut mg = cg.clone();
    let mut mh = ch.clone();
    mg.sort_unstable();
    mh.sort_unstable();
    if mg != mh {
        return None;
    }
    Some((cg, ch))
}

fn next_distinct(a: &[u64], b: &[u64]) -> usize {
    let mut all: Vec<u64> = a.iter().chain(b).copied().collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    g: &Graph,
    h: &Graph,
    colors_g: &[u64],
    colors_h: &[u64],
    order: &[Node],
    depth: usize,
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    for u in 0..h.node_count() {
        if used[u] || colors_h[u] != colors_g[v] || g.color(v) != h.color(u) {
            continue;
        }
        // Adjacency to all previously mapped nodes must agree.
        let consistent = order[..depth]
            .iter()
            .all(|&w| g.has_edge(v, w) == h.has_edge(u, image[w]));
        if !consistent {
            continue;
        }
        image[v] = u;
        used[u] = true;
        if backtrack(g, h, colors_g, colors_h, order, depth + 1, image, used) {
            return true;
        }
        used[u] = false;
        image[v] = usize::MAX;
    }
    false
}

// ---------------------------------------------------------------------------
// Substructure counting
// ---------------------------------------------------------------------------

/// Counting budget: exhaustive enumeration only below this node count.
pub const COUNTING_BUDGET: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubstructureKind {
    Cycle3,
    Cycle4,
    Cycle5,
    Cycle6,
    /// Triangle with one pendant edge (4 nodes, 4 edges).
    TailedTriangle,
    /// 4-cycle plus one chord (4 nodes, 5 edges).
    ChordalCycle,
    Clique4,
    /// Simple path with 4 edges (5 nodes).
    Path4,
    /// Triangle and 4-cycle sharing one edge (5 nodes, 6 edges).
    TriangleRectangle,
}

impl SubstructureKind {
    pub const ALL: [SubstructureKind; 9] = [
        SubstructureKind::Cycle3,
        SubstructureKind::Cycle4,
        SubstructureKind::Cycle5,
        SubstructureKind::Cycle6,
        SubstructureKind::TailedTriangle,
        SubstructureKind::ChordalCycle,
        SubstructureKind::Clique4,
        SubstructureKind::Path4,
        SubstructureKind::TriangleRectangle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SubstructureKind::Cycle3 => "cycle3",
            SubstructureKind::Cycle4 => "cycle4",
            SubstructureKind::Cycle5 => "cycle5",
            SubstructureKind::Cycle6 => "cycle6",
            SubstructureKind::TailedTriangle => "tailed_triangle",
            SubstructureKind::ChordalCycle => "chordal_cycle",
            SubstructureKind::Clique4 => "clique4",
            SubstructureKind::Path4 => "path4",
            SubstructureKind::TriangleRectangle => "triangle_rectangle",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Pattern graph as `(node count, edge list)`. The single place where the
    /// pattern conventions live:
    /// - cycles and cliques count as subgraphs (not induced);
    /// - a 4-path is a simple path with 4 edges on 5 nodes;
    /// - chordal cycle is a 4-cycle plus one chord;
    /// - tailed triangle is a triangle plus a pendant edge;
    /// - triangle-rectangle is a triangle and a 4-cycle sharing one edge.
    pub fn pattern(&self) -> (usize, &'static [(usize, usize)]) {
        match self {
            SubstructureKind::Cycle3 => (3, &[(0, 1), (1, 2), (2, 0)]),
            SubstructureKind::Cycle4 => (4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
            SubstructureKind::Cycle5 => (5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]),
            SubstructureKind::Cycle6 => (6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]),
            SubstructureKind::TailedTriangle => (4, &[(0, 1), (1, 2), (2, 0), (2, 3)]),
            SubstructureKind::ChordalCycle => (4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]),
            SubstructureKind::Clique4 => (4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
            SubstructureKind::Path4 => (5, &[(0, 1), (1, 2), (2, 3), (3, 4)]),
            SubstructureKind::TriangleRectangle => {
                (5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 1)])
            }
        }
    }
}

/// Exact graph-level and per-node occurrence counts.
///
/// An occurrence is a subgraph of `g` isomorphic to the pattern, counted once
/// per unordered occurrence; a node's count is the number of occurrences
/// containing it, so per-node counts sum to `pattern size * total`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubstructureCount {
    pub total: u64,
    pub per_node: Vec<u64>,
}

pub fn count_substructure(
    g: &Graph,
    kind: SubstructureKind,
) -> Result<SubstructureCount, OracleError> {
    let n = g.node_count();
    if n > COUNTING_BUDGET {
        return Err(OracleError::BudgetExceeded {
            n,
            budget: COUNTING_BUDGET,
        });
    }
    let (p_nodes, p_edges) = kind.pattern();
    let aut = pattern_automorphism_count(p_nodes, p_edges);

    // Map pattern nodes in a connected order so each new node is constrained
    // by at least one already-mapped neighbor.
    let order = connected_order(p_nodes, p_edges);
    let mut image = vec![usize::MAX; p_nodes];
    let mut used = vec![false; n];
    let mut embeddings_per_node = vec![0u64; n];
    let mut embeddings = 0u64;
    embed(
        g,
        p_nodes,
        p_edges,
        &order,
        0,
        &mut image,
        &mut used,
        &mut embeddings,
        &mut embeddings_per_node,
    );

    debug_assert_eq!(embeddings % aut, 0);
    let per_node = embeddings_per_node.iter().map(|&e| e / aut).collect();
    Ok(SubstructureCount {
        total: embeddings / aut,
        per_node,
    })
}

fn connected_order(p_nodes: usize, p_edges: &[(usize, usize)]) -> Vec<usize> {
    let mut order = vec![0usize];
    let mut placed = vec![false; p_nodes];
    placed[0] = true;
    while order.len() < p_nodes {
        let next = (0..p_nodes)
            .find(|&v| {
                !placed[v]
                    && p_edges
                        .iter()
                        .any(|&(a, b)| (a == v && placed[b]) || (b == v && placed[a]))
            })
            .expect("patterns are connected");
        placed[next] = true;
        order.push(next);
    }
    order
}

fn pattern_automorphism_count(p_nodes: usize, p_edges: &[(usize, usize)]) -> u64 {
    let adj = |a: usize, b: usize| {
        p_edges
            .iter()
            .any(|&(x, y)| (x, y) == (a, b) || (y, x) == (a, b))
    };
    let mut perm: Vec<usize> = (0..p_nodes).collect();
    let mut count = 0u64;
    loop {
        let preserves = p_edges.iter().all(|&(a, b)| adj(perm[a], perm[b]))
            && (0..p_nodes)
                .flat_map(|a| (a + 1..p_nodes).map(move |b| (a, b)))
                .all(|(a, b)| adj(a, b) == adj(perm[a], perm[b]));
        if preserves {
            count += 1;
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    count
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

#[allow(clippy::too_many_arguments)]
fn embed(
    g: &Graph,
    p_nodes: usize,
    p_edges: &[(usize, usize)],
    order: &[usize],
    depth: usize,
    image: &mut [usize],
    used: &mut [bool],
    embeddings: &mut u64,
    per_node: &mut [u64],
) {
    if depth == p_nodes {
        *embeddings += 1;
        for &img in image.iter() {
            per_node[img] += 1;
        }
        return;
    }
    let p = order[depth];
    // Candidates: either neighbors of some mapped pattern-neighbor, or all
    // nodes for the root.
    let anchor = p_edges.iter().find_map(|&(a, b)| {
        if a == p && image[b] != usize::MAX {
            Some(image[b])
        } else if b == p && image[a] != usize::MAX {
            Some(image[a])
        } else {
            None
        }
    });
    let candidates: Vec<usize> = match anchor {
        Some(u) => g.neighbors(u).to_vec(),
        None => (0..g.node_count()).collect(),
    };
    'cand: for &c in &candidates {
        if used[c] {
            continue;
        }
        for &(a, b) in p_edges {
            let (other, this) = if a == p {
                (b, a)
            } else if b == p {
                (a, b)
            } else {
                continue;
            };
            debug_assert_eq!(this, p);
            if image[other] != usize::MAX && !g.has_edge(c, image[other]) {
                continue 'cand;
            }
        }
        image[p] = c;
        used[c] = true;
        embed(
            g,
            p_nodes,
            p_edges,
            order,
            depth + 1,
            image,
            used,
            embeddings,
            per_node,
        );
        used[c] = false;
        image[p] = usize::MAX;
    }
}

// ---------------------------------------------------------------------------
// Distance-two-cliques
// ---------------------------------------------------------------------------

/// Searches for a node set of the given size whose members are pairwise at
/// distance exactly two; returns a witness when one exists. `size` must be
/// at least 2.
pub fn has_distance_two_clique(g: &Graph, size: usize) -> Option<Vec<Node>> {
    assert!(size >= 2, "distance-two-cliques need size >= 2");
    let mut chosen: Vec<Node> = Vec::with_capacity(size);
    if d2c_search(g, size, 0, &mut chosen, &mut None) {
        Some(chosen)
    } else {
        None
    }
}

/// Exact number of node sets of the given size that are pairwise at distance
/// exactly two. An isomorphism invariant, unlike bare existence.
pub fn count_distance_two_cliques(g: &Graph, size: usize) -> u64 {
    assert!(size >= 2, "distance-two-cliques need size >= 2");
    let mut count = Some(0u64);
    let mut chosen: Vec<Node> = Vec::with_capacity(size);
    d2c_search(g, size, 0, &mut chosen, &mut count);
    count.unwrap()
}

/// When `count` is `None`, stops at the first full clique and leaves it in
/// `chosen`; otherwise tallies all of them.
fn d2c_search(
    g: &Graph,
    size: usize,
    start: Node,
    chosen: &mut Vec<Node>,
    count: &mut Option<u64>,
) -> bool {
    if chosen.len() == size {
        match count {
            Some(c) => {
                *c += 1;
                return false;
            }
            None => return true,
        }
    }
    for v in start..g.node_count() {
        if chosen.iter().all(|&u| g.spd(u, v) == 2) {
            chosen.push(v);
            if d2c_search(g, size, v + 1, chosen, count) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}
