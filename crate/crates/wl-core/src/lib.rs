//! Color-refinement toolkit for the Weisfeiler-Lehman test family.
//!
//! Implements 1-WL, k-WL, k-FWL, tuple-replacement refinement with
//! equivariant neighbor sets (including the overlapping-neighborhood
//! instance), plus the hard-instance generators and brute-force oracles
//! needed to verify their separation behavior at desk scale.
//!
//! The pieces:
//! - [`graph`]: immutable colored graphs, distances, permutations;
//! - [`graph6`] / [`io`]: file formats;
//! - [`interner`] / [`algorithm`] / [`engine`]: injective color codes and
//!   the fixed-point refinement loop with lockstep graph comparison;
//! - [`es`] / [`ktfwl`]: equivariant neighbor sets and the tuple update rule;
//! - [`generators`]: companion pairs, circulants, the strongly regular pair,
//!   seeded random graphs;
//! - [`oracles`]: exhaustive isomorphism, substructure counting,
//!   distance-two-cliques;
//! - [`suite`]: the verification batteries run by `wl suite`.
//!
//! ```
//! use wl_core::{joint_distinguish, srg_pair, AlgorithmSpec, Verdict};
//!
//! let pair = srg_pair();
//! let blind = AlgorithmSpec::new("kfwl(2)".parse().unwrap());
//! let sharp = AlgorithmSpec::new("n2fwl(h=1)".parse().unwrap());
//! assert!(matches!(
//!     joint_distinguish(&blind, &pair.shrikhande, &pair.rook).unwrap(),
//!     Verdict::Equivalent { .. }
//! ));
//! assert!(matches!(
//!     joint_distinguish(&sharp, &pair.shrikhande, &pair.rook).unwrap(),
//!     Verdict::Distinguished { .. }
//! ));
//! ```

pub mod algorithm;
pub mod engine;
pub mod es;
pub mod generators;
pub mod graph;
pub mod graph6;
pub mod interner;
pub mod io;
pub mod ktfwl;
pub mod oracles;
pub mod suite;

pub use algorithm::{Algorithm, AlgorithmSpec, SpecError};
pub use engine::{
    histogram_equal, joint_distinguish, lockstep_refine, refine, EngineError, LockstepRun,
    RefinementResult, TupleColoring, Verdict,
};
pub use es::{BaseSet, EquivariantSetSpec, GlobalFilter, Hops};
pub use generators::{cfi_pair, csl_graph, random_graph, srg_pair, CfiPair, SplitMix64, SrgPair};
pub use graph::{DistanceTable, Graph, GraphError, Node, Permutation};
pub use graph6::{parse_graph6, to_graph6, Graph6Error};
pub use interner::{ColorId, ColorInterner};
pub use ktfwl::{
    hierarchical_encode, n2_neighborhood, neighborhood_tuple, update_tuple_color,
    NeighborhoodPattern,
};
pub use oracles::{
    are_isomorphic, count_substructure, has_distance_two_clique, SubstructureCount,
    SubstructureKind,
};
