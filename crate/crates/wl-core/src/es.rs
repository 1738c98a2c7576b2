//! Equivariant neighbor sets for tuple refinement.
//!
//! An equivariant set maps a k-tuple `v` to a set of nodes that commutes with
//! node relabeling: `w` is in the set for `v` on `G` exactly when `g(w)` is in
//! the set for `g.v` on `g.G`. A [`EquivariantSetSpec`] describes one base set
//! per t-tuple coordinate plus an optional global filter applied to every
//! coordinate; the evaluated t-tuple neighborhood is the Cartesian product of
//! the filtered coordinate sets.
//!
//! The textual grammar used by the CLI:
//!
//! ```text
//! es     := product ('&' filter)? | 'n2(h=' hops ')'
//! product:= atom '*' COUNT | 'prod(' atom (',' atom)* ')' | atom
//! atom   := 'global' | 'closed_nbr(' IDX ')' | 'open_nbr(' IDX ')'
//!         | 'hop_ball(' IDX ',' hops ')' | 'union_open' | 'union_closed'
//!         | 'common_nbr' | 'spd_shell' | 'geodesic'
//! filter := 'overlap(h=' hops ')'
//! hops   := INT | 'inf'
//! ```
//!
//! `n2(h=H)` is sugar for `prod(closed_nbr(2),closed_nbr(1)) & overlap(h=H)`,
//! the overlapping-subgraph neighborhood `(N_1(v2) x N_1(v1)) ^ (N_h(v1) ^ N_h(v2))^2`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Node};

/// A hop count that may be unbounded. `Infinite` means "no distance
/// restriction": infinite hop balls cover all of `V(G)` and an infinite
/// overlap filter is dropped entirely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hops {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Hops {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hops::Finite(h) => write!(f, "{h}"),
            Hops::Infinite => write!(f, "inf"),
        }
    }
}

/// Per-coordinate node set, parameterized by the anchor tuple `v`.
/// Coordinate references are 1-based to match the grammar.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseSet {
    /// All of `V(G)`.
    Global,
    /// Closed neighborhood `N_1(v_i)` (contains `v_i`).
    ClosedNbr(usize),
    /// Open neighborhood `Q_1(v_i)`.
    OpenNbr(usize),
    /// `N_h(v_i)`, everything within `h` hops.
    HopBall(usize, Hops),
    /// Union of open neighborhoods over all tuple coordinates.
    UnionOpenNbrs,
    /// Union of closed neighborhoods over all tuple coordinates.
    UnionClosedNbrs,
    /// Common neighbors `Q_1(v_1) ^ Q_1(v_2)`.
    CommonNbr,
    /// `Q_d(v_1) ^ Q_1(v_2)` where `d = SPD(v_1, v_2)`; empty when the pair
    /// is disconnected.
    SpdShell,
    /// All nodes on shortest paths between `v_1` and `v_2`, endpoints
    /// included; `{v_1}` when the coordinates coincide, empty when
    /// disconnected.
    GeodesicSet,
}

impl BaseSet {
    /// Largest coordinate index this descriptor dereferences (0 when none).
    fn max_coord(&self) -> usize {
        match self {
            BaseSet::Global | BaseSet::UnionOpenNbrs | BaseSet::UnionClosedNbrs => 0,
            BaseSet::ClosedNbr(i) | BaseSet::OpenNbr(i) | BaseSet::HopBall(i, _) => *i,
            BaseSet::CommonNbr | BaseSet::SpdShell | BaseSet::GeodesicSet => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GlobalFilter {
    /// Restrict every coordinate to the overlap of hop balls of all tuple
    /// coordinates: the intersection over `i` of `N_h(v_i)`.
    HopOverlap(Hops),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EquivariantSetSpec {
    pub coords: Vec<BaseSet>,
    pub filter: Option<GlobalFilter>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EsError {
    #[error("equivariant set has no coordinates")]
    Empty,
    #[error("descriptor references tuple coordinate {coord} but k = {k}")]
    CoordOutOfRange { coord: usize, k: usize },
    #[error("cannot parse equivariant set at `{rest}`: {message}")]
    Parse { rest: String, message: &'static str },
}

impl EquivariantSetSpec {
    pub fn new(coords: Vec<BaseSet>, filter: Option<GlobalFilter>) -> Self {
        EquivariantSetSpec { coords, filter }
    }

    /// `V(G)^t`, which makes the update rule degenerate to plain (k,t)-FWL.
    pub fn global(t: usize) -> Self {
        EquivariantSetSpec::new(vec![BaseSet::Global; t], None)
    }

    /// `(N_1(v2) x N_1(v1)) ^ (N_h(v1) ^ N_h(v2))^2`: both coordinates'
    /// direct neighborhoods inside the overlapping h-hop subgraph.
    pub fn n2(h: Hops) -> Self {
        EquivariantSetSpec::new(
            vec![BaseSet::ClosedNbr(2), BaseSet::ClosedNbr(1)],
            Some(GlobalFilter::HopOverlap(h)),
        )
    }

    pub fn arity(&self) -> usize {
        self.coords.len()
    }

    /// Checks that every descriptor is well-defined for tuples of arity `k`.
    pub fn validate_for(&self, k: usize) -> Result<(), EsError> {
        if self.coords.is_empty() {
            return Err(EsError::Empty);
        }
        for c in &self.coords {
            let m = c.max_coord();
            if m > k {
                return Err(EsError::CoordOutOfRange { coord: m, k });
            }
        }
        Ok(())
    }

    /// Evaluates each coordinate to a sorted node set for the anchor tuple
    /// `v`, with the global filter already intersected in. The spec must be
    /// valid for `v.len()` (see [`validate_for`](Self::validate_for)).
    pub fn coordinate_sets(&self, g: &Graph, v: &[Node]) -> Vec<Vec<Node>> {
        let filter = self.filter.as_ref().map(|f| f.evaluate(g, v));
        self.coords
            .iter()
            .map(|c| {
                let mut set = c.evaluate(g, v);
                if let Some(keep) = &filter {
                    set.retain(|u| keep[*u]);
                }
                set
            })
            .collect()
    }

    /// Materializes the full product: every t-tuple `w`, lexicographically
    /// sorted. Prefer [`coordinate_sets`](Self::coordinate_sets) when the
    /// product would be consumed lazily.
    pub fn evaluate(&self, g: &Graph, v: &[Node]) -> Result<Vec<Vec<Node>>, EsError> {
        self.validate_for(v.len())?;
        let sets = self.coordinate_sets(g, v);
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(sets.len());
        product_rec(&sets, 0, &mut current, &mut out);
        Ok(out)
    }
}

fn product_rec(
    sets: &[Vec<Node>],
    depth: usize,
    current: &mut Vec<Node>,
    out: &mut Vec<Vec<Node>>,
) {
    if depth == sets.len() {
        out.push(current.clone());
        return;
    }
    for &u in &sets[depth] {
        current.push(u);
        product_rec(sets, depth + 1, current, out);
        current.pop();
    }
}

impl BaseSet {
    /// Sorted node set for anchor tuple `v`.
    pub fn evaluate(&self, g: &Graph, v: &[Node]) -> Vec<Node> {
        let n = g.node_count();
        match self {
            BaseSet::Global => (0..n).collect(),
            BaseSet::OpenNbr(i) => g.neighbors(v[i - 1]).to_vec(),
            BaseSet::ClosedNbr(i) => {
                let mut set = g.neighbors(v[i - 1]).to_vec();
                let anchor = v[i - 1];
                let pos = set.partition_point(|&u| u < anchor);
                set.insert(pos, anchor);
                set
            }
            BaseSet::HopBall(i, h) => match h {
                Hops::Infinite => (0..n).collect(),
                Hops::Finite(h) => {
                    let anchor = v[i - 1];
                    (0..n).filter(|&u| g.spd(anchor, u) <= *h).collect()
                }
            },
            BaseSet::UnionOpenNbrs => {
                let mut mark = vec![false; n];
                for &vi in v {
                    for &u in g.neighbors(vi) {
                        mark[u] = true;
                    }
                }
                (0..n).filter(|&u| mark[u]).collect()
            }
            BaseSet::UnionClosedNbrs => {
                let mut mark = vec![false; n];
                for &vi in v {
                    mark[vi] = true;
                    for &u in g.neighbors(vi) {
                        mark[u] = true;
                    }
                }
                (0..n).filter(|&u| mark[u]).collect()
            }
            BaseSet::CommonNbr => {
                let (a, b) = (v[0], v[1]);
                g.neighbors(a)
                    .iter()
                    .copied()
                    .filter(|&u| g.has_edge(b, u))
                    .collect()
            }
            BaseSet::SpdShell => {
                let (a, b) = (v[0], v[1]);
                let d = g.spd(a, b);
                if d >= g.distances().infinity() {
                    return Vec::new();
                }
                g.neighbors(b)
                    .iter()
                    .copied()
                    .filter(|&u| g.spd(a, u) == d)
                    .collect()
            }
            BaseSet::GeodesicSet => {
                let (a, b) = (v[0], v[1]);
                let d = g.spd(a, b);
                if d >= g.distances().infinity() {
                    return Vec::new();
                }
                (0..n)
                    .filter(|&u| g.spd(a, u).saturating_add(g.spd(u, b)) == d)
                    .collect()
            }
        }
    }
}

impl GlobalFilter {
    /// Membership mask over `V(G)`.
    fn evaluate(&self, g: &Graph, v: &[Node]) -> Vec<bool> {
        match self {
            GlobalFilter::HopOverlap(Hops::Infinite) => vec![true; g.node_count()],
            GlobalFilter::HopOverlap(Hops::Finite(h)) => (0..g.node_count())
                .map(|u| v.iter().all(|&vi| g.spd(vi, u) <= *h))
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Grammar
// ---------------------------------------------------------------------------

impl fmt::Display for BaseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseSet::Global => write!(f, "global"),
            BaseSet::ClosedNbr(i) => write!(f, "closed_nbr({i})"),
            BaseSet::OpenNbr(i) => write!(f, "open_nbr({i})"),
            BaseSet::HopBall(i, h) => write!(f, "hop_ball({i},{h})"),
            BaseSet::UnionOpenNbrs => write!(f, "union_open"),
            BaseSet::UnionClosedNbrs => write!(f, "union_closed"),
            BaseSet::CommonNbr => write!(f, "common_nbr"),
            BaseSet::SpdShell => write!(f, "spd_shell"),
            BaseSet::GeodesicSet => write!(f, "geodesic"),
        }
    }
}

impl fmt::Display for EquivariantSetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let (true, Some(GlobalFilter::HopOverlap(h))) = (
            self.coords == EquivariantSetSpec::n2(Hops::Infinite).coords,
            &self.filter,
        ) {
            return write!(f, "n2(h={h})");
        }
        let all_equal = self.coords.windows(2).all(|w| w[0] == w[1]);
        if self.coords.len() == 1 {
            write!(f, "{}", self.coords[0])?;
        } else if all_equal {
            write!(f, "{}*{}", self.coords[0], self.coords.len())?;
        } else {
            write!(f, "prod(")?;
            for (i, c) in self.coords.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")?;
        }
        if let Some(GlobalFilter::HopOverlap(h)) = &self.filter {
            write!(f, " & overlap(h={h})")?;
        }
        Ok(())
    }
}

pub(crate) struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(text: &'a str) -> Self {
        Cursor { text, pos: 0 }
    }

    pub fn skip_ws(&mut self) {
        while self.rest().starts_with(' ') {
            self.pos += 1;
        }
    }

    pub fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    pub fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, token: &str, message: &'static str) -> Result<(), EsError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(message))
        }
    }

    pub fn integer(&mut self) -> Result<usize, EsError> {
        self.skip_ws();
        let rest = self.rest();
        let digits: usize = rest.chars().take_while(|c| c.is_ascii_digit()).count();
        if digits == 0 {
            return Err(self.error("expected an integer"));
        }
        let value = rest[..digits]
            .parse()
            .map_err(|_| self.error("integer out of range"))?;
        self.pos += digits;
        Ok(value)
    }

    pub fn hops(&mut self) -> Result<Hops, EsError> {
        if self.eat("inf") {
            Ok(Hops::Infinite)
        } else {
            Ok(Hops::Finite(self.integer()? as u32))
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    pub fn error(&self, message: &'static str) -> EsError {
        EsError::Parse {
            rest: self.rest().chars().take(24).collect(),
            message,
        }
    }
}

fn parse_atom(cur: &mut Cursor) -> Result<BaseSet, EsError> {
    cur.skip_ws();
    if cur.eat("global") {
        Ok(BaseSet::Global)
    } else if cur.eat("closed_nbr(") {
        let i = cur.integer()?;
        cur.expect(")", "expected `)`")?;
        Ok(BaseSet::ClosedNbr(i))
    } else if cur.eat("open_nbr(") {
        let i = cur.integer()?;
        cur.expect(")", "expected `)`")?;
        Ok(BaseSet::OpenNbr(i))
    } else if cur.eat("hop_ball(") {
        let i = cur.integer()?;
        cur.expect(",", "expected `,`")?;
        let h = cur.hops()?;
        cur.expect(")", "expected `)`")?;
        Ok(BaseSet::HopBall(i, h))
    } else if cur.eat("union_open") {
        Ok(BaseSet::UnionOpenNbrs)
    } else if cur.eat("union_closed") {
        Ok(BaseSet::UnionClosedNbrs)
    } else if cur.eat("common_nbr") {
        Ok(BaseSet::CommonNbr)
    } else if cur.eat("spd_shell") {
        Ok(BaseSet::SpdShell)
    } else if cur.eat("geodesic") {
        Ok(BaseSet::GeodesicSet)
    } else {
        Err(cur.error("expected a base-set name"))
    }
}

pub(crate) fn parse_es(cur: &mut Cursor) -> Result<EquivariantSetSpec, EsError> {
    cur.skip_ws();
    if cur.eat("n2(h=") {
        let h = cur.hops()?;
        cur.expect(")", "expected `)`")?;
        return Ok(EquivariantSetSpec::n2(h));
    }
    let coords = if cur.eat("prod(") {
        let mut coords = vec![parse_atom(cur)?];
        while cur.eat(",") {
            coords.push(parse_atom(cur)?);
        }
        cur.expect(")", "expected `)`")?;
        coords
    } else {
        let atom = parse_atom(cur)?;
        if cur.eat("*") {
            let count = cur.integer()?;
            if count == 0 {
                return Err(cur.error("repeat count must be positive"));
            }
            vec![atom; count]
        } else {
            vec![atom]
        }
    };
    let filter = if cur.eat("&") {
        cur.expect("overlap(h=", "expected `overlap(h=`")?;
        let h = cur.hops()?;
        cur.expect(")", "expected `)`")?;
        Some(GlobalFilter::HopOverlap(h))
    } else {
        None
    };
    Ok(EquivariantSetSpec::new(coords, filter))
}

impl std::str::FromStr for EquivariantSetSpec {
    type Err = EsError;

    fn from_str(s: &str) -> Result<Self, EsError> {
        let mut cur = Cursor::new(s);
        let spec = parse_es(&mut cur)?;
        if !cur.at_end() {
            return Err(cur.error("trailing input"));
        }
        Ok(spec)
    }
}

/// The built-in equivariant-set constructions, named by shape. Each pairs a
/// display label with the spec and the tuple arity `k` it is meant for.
pub fn builtin_specs() -> Vec<(&'static str, usize, EquivariantSetSpec)> {
    vec![
        ("global-pair", 2, EquivariantSetSpec::global(2)),
        (
            "closed-union",
            2,
            EquivariantSetSpec::new(vec![BaseSet::UnionClosedNbrs], None),
        ),
        (
            "open-union",
            2,
            EquivariantSetSpec::new(vec![BaseSet::UnionOpenNbrs], None),
        ),
        (
            "common-square",
            2,
            EquivariantSetSpec::new(vec![BaseSet::CommonNbr, BaseSet::CommonNbr], None),
        ),
        (
            "cross-neighborhood",
            2,
            EquivariantSetSpec::new(vec![BaseSet::OpenNbr(2), BaseSet::OpenNbr(1)], None),
        ),
        (
            "spd-shell",
            2,
            EquivariantSetSpec::new(vec![BaseSet::SpdShell], None),
        ),
        (
            "geodesic-cross",
            2,
            EquivariantSetSpec::new(vec![BaseSet::OpenNbr(2), BaseSet::GeodesicSet], None),
        ),
        ("n2-h1", 2, EquivariantSetSpec::n2(Hops::Finite(1))),
        ("n2-h2", 2, EquivariantSetSpec::n2(Hops::Finite(2))),
        ("n2-inf", 2, EquivariantSetSpec::n2(Hops::Infinite)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Permutation;

    fn path3() -> Graph {
        // Nodes 0-1-2 in a path.
        Graph::new(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn c6() -> Graph {
        Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]).unwrap()
    }

    #[test]
    fn global_product_covers_all_tuples() {
        let g = path3();
        let es = EquivariantSetSpec::global(2);
        assert_eq!(es.evaluate(&g, &[0, 2]).unwrap().len(), 9);
    }

    #[test]
    fn n2_on_path_endpoints() {
        // Path 0-1-2, anchor (0,2), h=1:
        // (N_1(2) x N_1(0)) ^ (N_1(0) ^ N_1(2))^2 = {(1,1)}.
        let g = path3();
        let es = EquivariantSetSpec::n2(Hops::Finite(1));
        assert_eq!(es.evaluate(&g, &[0, 2]).unwrap(), vec![vec![1, 1]]);
    }

    #[test]
    fn n2_infinite_drops_ball_filter() {
        let g = path3();
        let es = EquivariantSetSpec::n2(Hops::Infinite);
        // N_1(2) x N_1(0) = {1,2} x {0,1}.
        assert_eq!(
            es.evaluate(&g, &[0, 2]).unwrap(),
            vec![vec![1, 0], vec![1, 1], vec![2, 0], vec![2, 1]]
        );
    }

    #[test]
    fn n2_isolated_diagonal_tuple() {
        let g = Graph::new(2, &[]).unwrap();
        let es = EquivariantSetSpec::n2(Hops::Finite(3));
        assert_eq!(es.evaluate(&g, &[0, 0]).unwrap(), vec![vec![0, 0]]);
    }

    #[test]
    fn n2_monotone_in_h() {
        let g = c6();
        let sets: Vec<Vec<Vec<usize>>> = [
            Hops::Finite(1),
            Hops::Finite(2),
            Hops::Finite(3),
            Hops::Infinite,
        ]
        .iter()
        .map(|&h| EquivariantSetSpec::n2(h).evaluate(&g, &[0, 2]).unwrap())
        .collect();
        for pair in sets.windows(2) {
            for w in &pair[0] {
                assert!(pair[1].contains(w), "{w:?} dropped when widening h");
            }
        }
    }

    #[test]
    fn geodesic_set_covers_both_c6_paths() {
        let g = c6();
        let es = EquivariantSetSpec::new(vec![BaseSet::GeodesicSet], None);
        let nodes: Vec<usize> = es
            .evaluate(&g, &[0, 3])
            .unwrap()
            .into_iter()
            .map(|w| w[0])
            .collect();
        assert_eq!(nodes, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn geodesic_of_equal_endpoints_is_singleton() {
        let g = c6();
        assert_eq!(BaseSet::GeodesicSet.evaluate(&g, &[4, 4]), vec![4]);
    }

    #[test]
    fn spd_shell_disconnected_is_empty() {
        let g = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(BaseSet::SpdShell.evaluate(&g, &[0, 2]).is_empty());
        assert!(BaseSet::GeodesicSet.evaluate(&g, &[0, 2]).is_empty());
    }

    #[test]
    fn validation_rejects_bad_coordinate() {
        let es = EquivariantSetSpec::new(vec![BaseSet::ClosedNbr(3)], None);
        assert_eq!(
            es.validate_for(2),
            Err(EsError::CoordOutOfRange { coord: 3, k: 2 })
        );
        assert!(es.validate_for(3).is_ok());
    }

    #[test]
    fn grammar_round_trips() {
        let samples = [
            "global*2",
            "n2(h=3)",
            "n2(h=inf)",
            "prod(open_nbr(2),geodesic)",
            "union_open",
            "spd_shell",
            "common_nbr*2",
            "prod(hop_ball(1,2),closed_nbr(1)) & overlap(h=4)",
        ];
        for s in samples {
            let spec: EquivariantSetSpec = s.parse().unwrap();
            let printed = spec.to_string();
            let back: EquivariantSetSpec = printed.parse().unwrap();
            assert_eq!(spec, back, "grammar round-trip failed for {s} -> {printed}");
        }
    }

    #[test]
    fn grammar_rejects_garbage() {
        assert!("".parse::<EquivariantSetSpec>().is_err());
        assert!("global*0".parse::<EquivariantSetSpec>().is_err());
        assert!("globalx".parse::<EquivariantSetSpec>().is_err());
        assert!("prod(open_nbr(1)".parse::<EquivariantSetSpec>().is_err());
    }

    #[test]
    fn base_sets_commute_with_relabeling() {
        let g = c6();
        let p = Permutation::from_vec(vec![2, 4, 0, 5, 1, 3]).unwrap();
        let gp = g.apply_permutation(&p).unwrap();
        let v = [0usize, 3];
        let pv: Vec<usize> = v.iter().map(|&x| p.apply(x)).collect();
        for (_, k, spec) in builtin_specs() {
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
            assert_eq!(mapped, direct, "equivariance failed for {spec}");
        }
    }
}
