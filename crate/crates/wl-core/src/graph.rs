//! Immutable undirected colored graphs with precomputed shortest-path distances.
//!
//! Nodes are `0..n`. Edges are unordered pairs with no self-loops. Every node
//! carries a small integer color label (all zero unless stated otherwise).
//! A [`Graph`] is immutable after construction and safe to share read-only
//! across threads.

use std::fmt;

use thiserror::Error;

/// Node index, always in `0..n` for the owning graph.
pub type Node = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: Node, n: usize },
    #[error("self-loop at node {node} rejected")]
    SelfLoop { node: Node },
    #[error("permutation of length {got} applied to graph with {n} nodes")]
    SizeMismatch { got: usize, n: usize },
    #[error("color vector of length {got} for graph with {n} nodes")]
    ColorLengthMismatch { got: usize, n: usize },
    #[error("permutation is not a bijection: value {value} {problem}")]
    NotABijection { value: usize, problem: &'static str },
}

/// Immutable undirected colored graph.
///
/// Invariants enforced at construction:
/// - every edge endpoint is in `0..n`, no self-loops, edge set symmetric;
/// - neighbor lists are sorted ascending and consistent with the edge set;
/// - every node has a color (default 0).
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// Normalized edge list, `u < v`, sorted.
    edges: Vec<(Node, Node)>,
    colors: Vec<u32>,
    adj: Vec<Vec<Node>>,
    /// Flat adjacency bitset, `words_per_row` words per node.
    adj_bits: Vec<u64>,
    words_per_row: usize,
    dist: DistanceTable,
}

impl Graph {
    /// Builds a graph from an edge list; all node colors default to 0.
    /// Duplicate edges (in either orientation) are collapsed.
    pub fn new(n: usize, edges: &[(Node, Node)]) -> Result<Self, GraphError> {
        Self::with_colors(n, edges, &vec![0; n])
    }

    /// Builds a colored graph. `colors[v]` is the label of node `v`.
    pub fn with_colors(
        n: usize,
        edges: &[(Node, Node)],
        colors: &[u32],
    ) -> Result<Self, GraphError> {
        if colors.len() != n {
            return Err(GraphError::ColorLengthMismatch {
                got: colors.len(),
                n,
            });
        }
        let mut norm: Vec<(Node, Node)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n {
                return Err(GraphError::NodeOutOfRange { node: u, n });
            }
            if v >= n {
                return Err(GraphError::NodeOutOfRange { node: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop { node: u });
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        norm.dedup();

        let mut adj = vec![Vec::new(); n];
        let words_per_row = n.div_ceil(64).max(1);
        let mut adj_bits = vec![0u64; n * words_per_row];
        for &(u, v) in &norm {
            adj[u].push(v);
            adj[v].push(u);
            adj_bits[u * words_per_row + v / 64] |= 1 << (v % 64);
            adj_bits[v * words_per_row + u / 64] |= 1 << (u % 64);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let dist = DistanceTable::from_adjacency(n, &adj);
        Ok(Graph {
            n,
            edges: norm,
            colors: colors.to_vec(),
            adj,
            adj_bits,
            words_per_row,
            dist,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Normalized edge list (`u < v`, sorted ascending).
    pub fn edges(&self) -> &[(Node, Node)] {
        &self.edges
    }

    #[inline]
    pub fn has_edge(&self, u: Node, v: Node) -> bool {
        debug_assert!(u < self.n && v < self.n);
        self.adj_bits[u * self.words_per_row + v / 64] >> (v % 64) & 1 == 1
    }

    /// Sorted open neighborhood `Q_1(v)`.
    #[inline]
    pub fn neighbors(&self, v: Node) -> &[Node] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Node) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn color(&self, v: Node) -> u32 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    /// Shortest-path distance table, computed once at construction.
    pub fn distances(&self) -> &DistanceTable {
        &self.dist
    }

    /// Shortest-path distance in hops; `self.distances().infinity()` if unreachable.
    #[inline]
    pub fn spd(&self, u: Node, v: Node) -> u32 {
        self.dist.get(u, v)
    }

    /// Nodes at distance exactly `k` from `v`; `k = 0` yields `{v}`.
    pub fn kth_hop(&self, v: Node, k: usize) -> Result<Vec<Node>, GraphError> {
        if v >= self.n {
            return Err(GraphError::NodeOutOfRange { node: v, n: self.n });
        }
        let k = k as u32;
        Ok((0..self.n).filter(|&u| self.dist.get(v, u) == k).collect())
    }

    /// Nodes at distance at most `k` from `v`, including `v` itself.
    pub fn neighbors_within(&self, v: Node, k: usize) -> Result<Vec<Node>, GraphError> {
        if v >= self.n {
            return Err(GraphError::NodeOutOfRange { node: v, n: self.n });
        }
        let k = k as u32;
        Ok((0..self.n).filter(|&u| self.dist.get(v, u) <= k).collect())
    }

    /// Relabels nodes by `g`: node `v` becomes `g(v)`, colors carried along.
    pub fn apply_permutation(&self, g: &Permutation) -> Result<Graph, GraphError> {
        if g.len() != self.n {
            return Err(GraphError::SizeMismatch {
                got: g.len(),
                n: self.n,
            });
        }
        let edges: Vec<(Node, Node)> = self
            .edges
            .iter()
            .map(|&(u, v)| (g.apply(u), g.apply(v)))
            .collect();
        let mut colors = vec![0u32; self.n];
        for v in 0..self.n {
            colors[g.apply(v)] = self.colors[v];
        }
        Graph::with_colors(self.n, &edges, &colors)
    }

    /// Degree multiset, sorted ascending.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.n).map(|v| self.degree(v)).collect();
        d.sort_unstable();
        d
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .field("colors", &self.colors)
            .finish()
    }
}

/// All-pairs shortest-path distances in hop units.
///
/// Unreachable pairs hold the sentinel value `n` (one above any achievable
/// distance), exposed via [`DistanceTable::infinity`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DistanceTable {
    n: usize,
    dist: Vec<u32>,
}

impl DistanceTable {
    fn from_adjacency(n: usize, adj: &[Vec<Node>]) -> Self {
        let inf = n as u32;
        let mut dist = vec![inf; n * n];
        let mut queue = Vec::with_capacity(n);
        for src in 0..n {
            let row = &mut dist[src * n..(src + 1) * n];
            row[src] = 0;
            queue.clear();
            queue.push(src);
            let mut head = 0;
            while head < queue.len() {
                let u = queue[head];
                head += 1;
                let du = row[u];
                for &w in &adj[u] {
                    if row[w] == inf {
                        row[w] = du + 1;
                        queue.push(w);
                    }
                }
            }
        }
        DistanceTable { n, dist }
    }

    #[inline]
    pub fn get(&self, u: Node, v: Node) -> u32 {
        self.dist[u * self.n + v]
    }

    /// Sentinel for unreachable pairs.
    #[inline]
    pub fn infinity(&self) -> u32 {
        self.n as u32
    }

    #[inline]
    pub fn is_reachable(&self, u: Node, v: Node) -> bool {
        self.get(u, v) < self.infinity()
    }

    pub fn node_count(&self) -> usize {
        self.n
    }
}

/// A bijection `0..n -> 0..n` stored as an array: `g[v]` is the image of `v`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Validates that `map` is a bijection on `0..map.len()`.
    pub fn from_vec(map: Vec<usize>) -> Result<Self, GraphError> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &img in &map {
            if img >= n {
                return Err(GraphError::NotABijection {
                    value: img,
                    problem: "out of range",
                });
            }
            if seen[img] {
                return Err(GraphError::NotABijection {
                    value: img,
                    problem: "repeated",
                });
            }
            seen[img] = true;
        }
        Ok(Permutation(map))
    }

    /// Swaps `a` and `b`, fixing everything else.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(a, b);
        Permutation(map)
    }

    #[inline]
    pub fn apply(&self, v: usize) -> usize {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Fisher-Yates shuffle driven by the given deterministic stream.
    pub fn random(n: usize, rng: &mut crate::generators::SplitMix64) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            map.swap(i, j);
        }
        Permutation(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, &edges).unwrap()
    }

    /// Two disjoint triangles on nodes {0,1,2} and {3,4,5}.
    fn two_triangles() -> Graph {
        Graph::new(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn rejects_self_loops() {
        assert_eq!(
            Graph::new(3, &[(1, 1)]),
            Err(GraphError::SelfLoop { node: 1 })
        );
    }

    #[test]
    fn rejects_out_of_range_endpoints() {
        assert!(matches!(
            Graph::new(3, &[(0, 3)]),
            Err(GraphError::NodeOutOfRange { node: 3, n: 3 })
        ));
    }

    #[test]
    fn dedups_and_sorts_edges() {
        let g = Graph::new(3, &[(2, 0), (0, 2), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2)]);
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert!(g.has_edge(2, 0) && g.has_edge(0, 2));
        assert!(!g.has_edge(1, 2));
    }

    #[test]
    fn kth_hop_zero_is_self() {
        let g = cycle(6);
        assert_eq!(g.kth_hop(0, 0).unwrap(), vec![0]);
    }

    #[test]
    fn kth_hop_on_c6() {
        // BFS on C6 from node 0: hop 3 reaches only the antipode.
        let g = cycle(6);
        assert_eq!(g.kth_hop(0, 3).unwrap(), vec![3]);
        assert_eq!(g.kth_hop(0, 2).unwrap(), vec![2, 4]);
    }

    #[test]
    fn kth_hop_exhausted_component() {
        let g = two_triangles();
        assert!(g.kth_hop(0, 3).unwrap().is_empty());
        assert!(g.kth_hop(0, 7).unwrap().is_empty());
    }

    #[test]
    fn neighbors_within_path() {
        // Path 0-1-2: within one hop of node 0 sits {0,1}.
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.neighbors_within(0, 1).unwrap(), vec![0, 1]);
        assert_eq!(g.neighbors_within(0, 0).unwrap(), vec![0]);
    }

    #[test]
    fn neighbors_within_c6_two_hops() {
        let g = cycle(6);
        assert_eq!(g.neighbors_within(0, 2).unwrap(), vec![0, 1, 2, 4, 5]);
    }

    #[test]
    fn neighbors_within_out_of_range() {
        let g = cycle(6);
        assert!(g.neighbors_within(6, 1).is_err());
        assert!(g.kth_hop(6, 1).is_err());
    }

    #[test]
    fn spd_complete_graph() {
        let g = Graph::new(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        for u in 0..4 {
            for v in 0..4 {
                assert_eq!(g.spd(u, v), u32::from(u != v));
            }
        }
    }

    #[test]
    fn spd_c6_antipodal() {
        assert_eq!(cycle(6).spd(0, 3), 3);
    }

    #[test]
    fn spd_cross_component_is_infinity() {
        let g = two_triangles();
        assert_eq!(g.spd(0, 5), g.distances().infinity());
        assert_eq!(g.distances().infinity(), 6);
        assert!(!g.distances().is_reachable(0, 5));
    }

    #[test]
    fn identity_permutation_is_noop() {
        let g = two_triangles();
        let h = g.apply_permutation(&Permutation::identity(6)).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn transposition_moves_edge() {
        let g = Graph::new(3, &[(0, 2)]).unwrap();
        let h = g
            .apply_permutation(&Permutation::transposition(3, 0, 1))
            .unwrap();
        assert_eq!(h.edges(), &[(1, 2)]);
    }

    #[test]
    fn permutation_preserves_profiles() {
        let g = Graph::with_colors(
            5,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)],
            &[0, 1, 0, 2, 0],
        )
        .unwrap();
        let p = Permutation::from_vec(vec![3, 0, 4, 1, 2]).unwrap();
        let h = g.apply_permutation(&p).unwrap();
        assert_eq!(g.edge_count(), h.edge_count());
        assert_eq!(g.degree_sequence(), h.degree_sequence());
        let mut gc = g.colors().to_vec();
        let mut hc = h.colors().to_vec();
        gc.sort_unstable();
        hc.sort_unstable();
        assert_eq!(gc, hc);
    }

    #[test]
    fn permutation_size_mismatch() {
        let g = cycle(6);
        assert!(g.apply_permutation(&Permutation::identity(5)).is_err());
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::from_vec(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_vec(vec![0, 3, 1]).is_err());
        assert!(Permutation::from_vec(vec![2, 0, 1]).is_ok());
    }
}
