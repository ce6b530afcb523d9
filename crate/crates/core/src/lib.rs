//! Exact engine for the weighted TQFT of Quot-scheme intersection numbers
//! on Grassmannians `Gr(r, r+s)`.
//!
//! * [`partitions`]: the `r × s` box and its Schubert labels.
//! * [`laurent`]: `Z[q, q^-1]` coefficients.
//! * [`fusion`]: the small quantum cohomology ring and its structure table.
//! * [`spectrum`]: floating-point evaluation at the points of `Spec QH*`.
//! * [`tqft`]: weighted TQFT tensors, η-classes, Verlinde and Holla counts.

pub mod error;
pub mod fusion;
pub mod laurent;
pub mod partitions;
pub mod spectrum;
pub mod tqft;

pub use error::{Error, Result};
pub use fusion::{counit, giambelli_expand, quantum_pieri, GiambelliTerm, QClass, QuantumRing, StructureTable, TableRecord};
pub use laurent::LaurentInt;
pub use partitions::{enumerate_partitions, BoxContext, Partition};
pub use spectrum::SpectralPoint;
pub use tqft::{compose, ClosedFunctional, FiniteCount, SurfaceSignature, TensorKey, TqftTensor, WeightedTqft};
