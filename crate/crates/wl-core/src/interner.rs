//! Injective color codes realized by exact interning.
//!
//! Refinement needs an injective HASH; a probabilistic hash would risk
//! collisions that silently merge color classes and invalidate separation
//! verdicts. Instead every color is a canonical byte string interned into a
//! dense [`ColorId`], so equal ids mean byte-identical codes by construction.
//!
//! Canonical code formats (all lengths little-endian `u32`):
//! - atomic:   `A | k | label*k | adj-byte per i<j pair | eq-byte per i<j pair`
//! - label:    handled as atomic with `k = 1`
//! - tuple:    `T | len | id*len` (order preserved)
//! - multiset: `M | len | id*len` (ids sorted ascending)
//! - pair:     `P | prev-id | aggregate-id`

use std::collections::HashMap;

use crate::graph::{Graph, Node};

/// Opaque dense color identifier, valid only within its issuing interner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorId(pub u32);

/// Bijective map between canonical code bytes and dense [`ColorId`]s,
/// insertion-ordered.
#[derive(Debug, Default)]
pub struct ColorInterner {
    codes: Vec<Box<[u8]>>,
    index: HashMap<Box<[u8]>, ColorId>,
}

impl ColorInterner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id for `code`, issuing the next dense id if unseen.
    pub fn intern(&mut self, code: &[u8]) -> ColorId {
        if let Some(&id) = self.index.get(code) {
            return id;
        }
        let id = ColorId(u32::try_from(self.codes.len()).expect("interner overflow"));
        let boxed: Box<[u8]> = code.into();
        self.codes.push(boxed.clone());
        self.index.insert(boxed, id);
        id
    }

    pub fn get(&self, code: &[u8]) -> Option<ColorId> {
        self.index.get(code).copied()
    }

    /// Inverse lookup; `None` only for ids this interner never issued.
    pub fn lookup(&self, id: ColorId) -> Option<&[u8]> {
        self.codes.get(id.0 as usize).map(|c| c.as_ref())
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum AtomicTypeError {
    #[error("tuple entry {node} out of range for graph with {n} nodes")]
    EntryOutOfRange { node: Node, n: usize },
    #[error("atomic types need arity >= 1")]
    EmptyTuple,
}

/// Checked canonical code of a tuple's isomorphism type; two tuples
/// (possibly from different graphs) receive equal codes exactly when their
/// label sequences, adjacency patterns, and equality patterns all agree.
pub fn atomic_type(g: &Graph, tuple: &[Node]) -> Result<Vec<u8>, AtomicTypeError> {
    if tuple.is_empty() {
        return Err(AtomicTypeError::EmptyTuple);
    }
    for &v in tuple {
        if v >= g.node_count() {
            return Err(AtomicTypeError::EntryOutOfRange {
                node: v,
                n: g.node_count(),
            });
        }
    }
    let mut buf = Vec::new();
    atomic_code(&mut buf, g, tuple);
    Ok(buf)
}

pub(crate) const TAG_ATOMIC: u8 = b'A';
pub(crate) const TAG_TUPLE: u8 = b'T';
pub(crate) const TAG_MULTISET: u8 = b'M';
pub(crate) const TAG_PAIR: u8 = b'P';

fn push_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

/// Canonical code of the isomorphism type of a k-tuple: node labels in
/// sequence, the k x k adjacency pattern, and the k x k equality pattern
/// among the entries. Two tuples (possibly from different graphs) get equal
/// codes exactly when labels, adjacency, and equality patterns all match.
/// The equality pattern keeps diagonal tuples like `(v, v)` distinct from
/// tuples of two distinct non-adjacent nodes.
pub fn atomic_code(buf: &mut Vec<u8>, g: &Graph, tuple: &[Node]) {
    buf.clear();
    buf.push(TAG_ATOMIC);
    push_u32(buf, tuple.len() as u32);
    for &v in tuple {
        push_u32(buf, g.color(v));
    }
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            buf.push(u8::from(g.has_edge(tuple[i], tuple[j])));
        }
    }
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            buf.push(u8::from(tuple[i] == tuple[j]));
        }
    }
}

/// Order-preserving tuple code over already-interned member ids.
pub fn tuple_code(buf: &mut Vec<u8>, ids: &[ColorId]) {
    buf.clear();
    buf.push(TAG_TUPLE);
    push_u32(buf, ids.len() as u32);
    for id in ids {
        push_u32(buf, id.0);
    }
}

/// Multiset code: sorts `ids` in place, then encodes the sorted sequence.
/// Sorting by id is canonical because ids are bijective with codes.
pub fn multiset_code(buf: &mut Vec<u8>, ids: &mut [ColorId]) {
    ids.sort_unstable();
    buf.clear();
    buf.push(TAG_MULTISET);
    push_u32(buf, ids.len() as u32);
    for id in ids {
        push_u32(buf, id.0);
    }
}

/// `HASH(previous color, aggregate)` — the per-iteration update shell shared
/// by every refinement rule. Including the previous color makes each new
/// partition refine the last one.
pub fn pair_code(buf: &mut Vec<u8>, prev: ColorId, aggregate: ColorId) {
    buf.clear();
    buf.push(TAG_PAIR);
    push_u32(buf, prev.0);
    push_u32(buf, aggregate.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn interning_is_bijective() {
        let mut interner = ColorInterner::new();
        let a = interner.intern(b"alpha");
        let b = interner.intern(b"beta");
        let a2 = interner.intern(b"alpha");
        assert_eq!(a, a2);
        assert_ne!(a, b);
        assert_eq!(interner.lookup(a), Some(&b"alpha"[..]));
        assert_eq!(interner.lookup(b), Some(&b"beta"[..]));
        assert_eq!(interner.get(b"beta"), Some(b));
        assert_eq!(interner.len(), 2);
        // lookup . intern = identity on codes; intern . lookup = identity on ids.
        let code = interner.lookup(b).unwrap().to_vec();
        assert_eq!(interner.intern(&code), b);
    }

    #[test]
    fn ids_are_dense_and_insertion_ordered() {
        let mut interner = ColorInterner::new();
        for i in 0..100u32 {
            let id = interner.intern(&i.to_le_bytes());
            assert_eq!(id.0, i);
        }
    }

    #[test]
    fn atomic_type_checks_inputs() {
        let g = Graph::new(3, &[(0, 1)]).unwrap();
        assert_eq!(atomic_type(&g, &[]), Err(AtomicTypeError::EmptyTuple));
        assert_eq!(
            atomic_type(&g, &[0, 3]),
            Err(AtomicTypeError::EntryOutOfRange { node: 3, n: 3 })
        );
        assert!(atomic_type(&g, &[0, 1]).is_ok());
    }

    #[test]
    fn diagonal_tuple_differs_from_distinct_pair() {
        // (v, v) vs (u, w) with u != w: equality pattern must separate them
        // even when both are non-adjacent with equal labels.
        let g = Graph::new(3, &[]).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        atomic_code(&mut a, &g, &[1, 1]);
        atomic_code(&mut b, &g, &[0, 2]);
        assert_ne!(a, b);
    }

    #[test]
    fn atomic_code_ignores_node_identity() {
        // C6: (0,1) and (2,3) are both adjacent same-color pairs.
        let g = Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        atomic_code(&mut a, &g, &[0, 1]);
        atomic_code(&mut b, &g, &[2, 3]);
        assert_eq!(a, b);
        atomic_code(&mut b, &g, &[0, 2]);
        assert_ne!(a, b);
    }

    #[test]
    fn c6_and_two_triangles_share_atomic_type_multiset() {
        // Both graphs produce 6 diagonal, 12 adjacent, and 18 non-adjacent
        // ordered 2-tuples; enumerate all 36 on each side and compare.
        let c6 = Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]).unwrap();
        let cc = Graph::new(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let collect = |g: &Graph| {
            let mut codes = Vec::new();
            let mut buf = Vec::new();
            for u in 0..6 {
                for v in 0..6 {
                    atomic_code(&mut buf, g, &[u, v]);
                    codes.push(buf.clone());
                }
            }
            codes.sort();
            codes
        };
        assert_eq!(collect(&c6), collect(&cc));
    }

    #[test]
    fn multiset_code_is_order_insensitive() {
        let mut buf1 = Vec::new();
        let mut buf2 = Vec::new();
        multiset_code(&mut buf1, &mut [ColorId(3), ColorId(1), ColorId(2)]);
        multiset_code(&mut buf2, &mut [ColorId(2), ColorId(3), ColorId(1)]);
        assert_eq!(buf1, buf2);
        let mut buf3 = Vec::new();
        tuple_code(&mut buf3, &[ColorId(1), ColorId(2), ColorId(3)]);
        assert_ne!(buf1, buf3);
    }
}
