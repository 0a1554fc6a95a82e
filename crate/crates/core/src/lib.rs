//! Partitions of the hypercube `Q_n` into vertex-disjoint paths joining
//! prescribed endpoint pairs.
//!
//! The solver reduces dimension by splitting a pair-set along a coordinate
//! (see [`completion`]), recursing into both half-cubes and stitching the
//! results, with exhaustive search below dimension six. Every connector it
//! returns is re-checked by [`verify::check`].

pub mod basesolver;
pub mod completion;
pub mod connector;
pub mod hypercube;
pub mod io;
pub mod pairset;
pub mod sample;
pub mod solver;
pub mod verify;

pub use connector::Connector;
pub use hypercube::{HypercubeError, Vertex};
pub use pairset::{Matching, MergeEdge, Pair, PairKind, PairSet, PairSetError};
