//! Exact algebra and lattice numerics for the three-dimensional q-deformed Euclidean space.

pub mod algebra;
pub mod calculus;
pub mod classical;
pub mod dyson;
pub mod error;
pub mod lattice;
pub mod qcoeff;
pub mod qexp;
pub mod star;
pub mod suites;
pub mod scatter;
pub mod waves;

pub use algebra::{Mono, NSeries, Ordering, Space};
pub use error::{QError, QResult};
pub use lattice::{LatticeField, LatticeGrid};
pub use qcoeff::{DeformationParams, QScalar};
