//! Exact symbolic computation in graph W*-probability spaces.
//!
//! Elements are finite combinations of creation and annihilation operators
//! `L_w`, `L_w*` indexed by the free semigroupoid of a finite directed graph.
//! The crate computes their moments and cumulants with values in the
//! diagonal subalgebra `D_G`, tests freeness over `D_G`, and implements the
//! diagonal, off-diagonal and projection compressions.

pub mod cli;
pub mod compress;
pub mod cumulant;
pub mod expr;
pub mod fock;
pub mod graph;
pub mod nc;
pub mod random;
pub mod scalar;
pub mod verify;
pub mod word;

pub use compress::{
    diagonal_compress, off_diagonal_compress, projection_compress, FreenessQuery, FreenessVerdict, VertexSet,
};
pub use cumulant::{Alphabet, CumulantEngine, DiagonalSamples};
pub use expr::{DiagonalElement, Evaluated, FourierExpr};
pub use graph::{DirectedGraph, Path, VertexId};
pub use nc::NoncrossingPartition;
pub use scalar::Scalar;
pub use word::{Letter, Model, NormalForm, Word};
