//! Canonical polyhedral complexes of ReLU networks, PL Morse classification
//! of their vertices, and relatively perfect discrete gradient vector fields
//! on the compactified complex of cells bounded above, together with a mod-2
//! homology oracle that checks the construction.

pub mod complex;
pub mod dgvf;
pub mod error;
pub mod homology;
mod linalg;
pub mod lp;
pub mod network;
pub mod orientation;
pub mod render;
pub mod sign;
pub mod tolerance;

pub use complex::{build_complex, CanonicalComplex, Cell, CellId, VertexId, VertexRecord};
pub use error::{Error, Result};
pub use network::{Architecture, ReluNetwork};
pub use sign::{compose_signs, Sign, SignSequence};
pub use tolerance::Tolerances;
