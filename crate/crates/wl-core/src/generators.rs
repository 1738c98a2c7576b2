//! Deterministic construction of hard instances and test batteries.

use thiserror::Error;

use crate::graph::{Graph, Node};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("companion construction needs k >= 2, got {k}")]
    KTooSmall { k: usize },
    #[error("circulant needs n >= 5, got {n}")]
    NTooSmall { n: usize },
    #[error("invalid skip {skip} for circulant on {n} nodes")]
    InvalidSkip { n: usize, skip: usize },
    #[error("edge probability {p} outside [0, 1]")]
    BadProbability { p: f64 },
}

// ---------------------------------------------------------------------------
// Deterministic randomness
// ---------------------------------------------------------------------------

/// splitmix64 stream. Hand-rolled so seeded outputs never shift underneath
/// us when dependencies move.
#[derive(Debug, Clone)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..bound`.
    pub fn next_below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        (self.next_u64() % bound as u64) as usize
    }
}

/// Erdős–Rényi G(n, p); identical seeds give identical edge sets.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Result<Graph, GenError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GenError::BadProbability { p });
    }
    let mut rng = SplitMix64::new(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.next_f64() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::new(n, &edges).expect("generated edges are valid"))
}

// ---------------------------------------------------------------------------
// Companion pairs over even/odd edge subsets
// ---------------------------------------------------------------------------

/// A pair of same-degree companion graphs built over the complete graph
/// `K_{k+1}`: indistinguishable to low-dimensional refinement yet
/// non-isomorphic. `g_side` uses even edge subsets everywhere; `h_side`
/// flips vertex 0 to odd subsets.
#[derive(Debug, Clone)]
pub struct CfiPair {
    pub k: usize,
    pub g_side: Graph,
    pub h_side: Graph,
    /// Human-readable description of each node index of `g_side`.
    pub g_labels: Vec<String>,
    /// Same for `h_side`.
    pub h_labels: Vec<String>,
}

/// Builds the companion pair over `K_{k+1}`.
///
/// Node numbering: meta nodes first, ordered by base vertex then subset
/// bitmask (ascending, bits follow the global edge order), then two nodes per
/// base edge in edge order, the `e^0` copy before `e^1`. Each side has
/// `(k+1) * 2^(k-1) + C(k+1,2) * 2` nodes: every one of the `C(k+1,2)` base
/// edges contributes a node pair.
pub fn cfi_pair(k: usize) -> Result<CfiPair, GenError> {
    if k < 2 {
        return Err(GenError::KTooSmall { k });
    }
    let (g_side, g_labels) = cfi_side(k, false);
    let (h_side, h_labels) = cfi_side(k, true);
    debug_assert_eq!(g_side.node_count(), h_side.node_count());
    debug_assert_eq!(g_side.degree_sequence(), h_side.degree_sequence());
    Ok(CfiPair {
        k,
        g_side,
        h_side,
        g_labels,
        h_labels,
    })
}

fn cfi_side(k: usize, twist_vertex_zero: bool) -> (Graph, Vec<String>) {
    let base_n = k + 1;
    // Base edges of K_{k+1} in lexicographic order.
    let mut base_edges: Vec<(usize, usize)> = Vec::new();
    for u in 0..base_n {
        for v in u + 1..base_n {
            base_edges.push((u, v));
        }
    }
    // Incident edge indices per base vertex, ascending.
    let incident: Vec<Vec<usize>> = (0..base_n)
        .map(|v| {
            base_edges
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| a == v || b == v)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();

    let mut labels: Vec<String> = Vec::new();
    // meta_ids[v] lists (node id, subset mask over incident[v]).
    let mut meta_ids: Vec<Vec<(Node, u32)>> = vec![Vec::new(); base_n];
    let mut next = 0usize;
    for (v, ids) in meta_ids.iter_mut().enumerate() {
        let want_odd = twist_vertex_zero && v == 0;
        for mask in 0..(1u32 << k) {
            if (mask.count_ones() % 2 == 1) == want_odd {
                ids.push((next, mask));
                labels.push(format!("v{v}:S{mask:0width$b}", width = k));
                next += 1;
            }
        }
    }
    let mut edge_ids: Vec<(Node, Node)> = Vec::new();
    for &(u, v) in &base_edges {
        edge_ids.push((next, next + 1));
        labels.push(format!("e{u}{v}:0"));
        labels.push(format!("e{u}{v}:1"));
        next += 2;
    }

    let mut edges: Vec<(Node, Node)> = Vec::new();
    for &(e0, e1) in &edge_ids {
        edges.push((e0, e1));
    }
    for v in 0..base_n {
        for &(meta, mask) in &meta_ids[v] {
            for (bit, &edge_idx) in incident[v].iter().enumerate() {
                let (e0, e1) = edge_ids[edge_idx];
                // Edge in the subset connects to the 1-copy, else the 0-copy.
                if mask >> bit & 1 == 1 {
                    edges.push((meta, e1));
                } else {
                    edges.push((meta, e0));
                }
            }
        }
    }
    (
        Graph::new(next, &edges).expect("construction is valid"),
        labels,
    )
}

// ---------------------------------------------------------------------------
// Circulant skip-link graphs
// ---------------------------------------------------------------------------

/// 4-regular circulant: ring edges `(i, i±1)` plus skip edges `(i, i±skip)`,
/// all mod `n`.
pub fn csl_graph(n: usize, skip: usize) -> Result<Graph, GenError> {
    if n < 5 {
        return Err(GenError::NTooSmall { n });
    }
    // skip = 1 duplicates the ring; skip = n-1 is the same chords backwards;
    // 2*skip = n pairs skip links up and drops the degree to 3.
    if skip < 2 || skip > n - 2 || 2 * skip == n {
        return Err(GenError::InvalidSkip { n, skip });
    }
    let mut edges = Vec::with_capacity(2 * n);
    for i in 0..n {
        edges.push((i, (i + 1) % n));
        edges.push((i, (i + skip) % n));
    }
    let g = Graph::new(n, &edges).expect("circulant edges are valid");
    debug_assert!((0..n).all(|v| g.degree(v) == 4));
    Ok(g)
}

// ---------------------------------------------------------------------------
// The strongly regular pair on 16 nodes
// ---------------------------------------------------------------------------

/// The Shrikhande graph and the 4x4 rook's graph, both SRG(16, 6, 2, 2).
#[derive(Debug, Clone)]
pub struct SrgPair {
    pub shrikhande: Graph,
    pub rook: Graph,
}

/// Builds both graphs and verifies the SRG(16,6,2,2) parameters on each;
/// panics if the construction ever degrades.
pub fn srg_pair() -> SrgPair {
    // Shrikhande: Cayley graph on Z4 x Z4 with connection set
    // {±(1,0), ±(0,1), ±(1,1)}. Node (i,j) is index 4*i + j.
    let mut edges = Vec::new();
    for i in 0..4usize {
        for j in 0..4usize {
            for (di, dj) in [(1, 0), (0, 1), (1, 1)] {
                let u = 4 * i + j;
                let v = 4 * ((i + di) % 4) + (j + dj) % 4;
                edges.push((u, v));
            }
        }
    }
    let shrikhande = Graph::new(16, &edges).expect("cayley edges are valid");

    // Rook: cells of a 4x4 grid, adjacent iff same row xor same column.
    let mut edges = Vec::new();
    for a in 0..16usize {
        for b in a + 1..16 {
            let (ra, ca) = (a / 4, a % 4);
            let (rb, cb) = (b / 4, b % 4);
            if (ra == rb) != (ca == cb) {
                edges.push((a, b));
            }
        }
    }
    let rook = Graph::new(16, &edges).expect("rook edges are valid");

    for (name, g) in [("shrikhande", &shrikhande), ("rook", &rook)] {
        assert_srg(name, g, 16, 6, 2, 2);
    }
    SrgPair { shrikhande, rook }
}

fn assert_srg(name: &str, g: &Graph, n: usize, degree: usize, lambda: usize, mu: usize) {
    assert_eq!(g.node_count(), n, "{name}: node count");
    for v in 0..n {
        assert_eq!(g.degree(v), degree, "{name}: degree of {v}");
    }
    for u in 0..n {
        for v in u + 1..n {
            let common = g.neighbors(u).iter().filter(|&&w| g.has_edge(v, w)).count();
            let expected = if g.has_edge(u, v) { lambda } else { mu };
            assert_eq!(common, expected, "{name}: common neighbors of ({u},{v})");
        }
    }
}
