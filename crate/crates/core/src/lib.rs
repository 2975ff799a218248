//! cubex-core: combinatorial machinery for finite nonpositively curved cube
//! complexes of dimension at most 3.
//!
//! The crate provides complexes and maps ([`complex`], [`map`]), hyperplanes
//! and specialness checks with witnesses ([`hyperplane`]), finite covers by
//! voltage enumeration and fiber products ([`cover`], [`fiber`]), graphs of
//! cube complexes with monodromy and retractions ([`goc`], [`monodromy`],
//! [`retract`]), and the end-to-end construction of a certified special
//! finite cover ([`pipeline`]).

pub mod complex;
pub mod corpus;
pub mod cover;
pub mod error;
pub mod fiber;
pub mod goc;
pub mod hyperplane;
pub mod map;
pub mod monodromy;
pub mod parse;
pub mod pipeline;
pub mod presentation;
pub mod retract;
pub mod unionfind;

pub use complex::{CubeComplex, DirectedEdge, EdgeId, SquareId, Subcomplex, VertexId};
pub use error::{Error, Result};
pub use map::{check_local_isometry, CubicalMap};
