//! Exact coefficients in Q(i)(q) and q-combinatorics.

pub mod combinat;
pub mod gauss;
pub mod linalg;
pub mod modular;
pub mod poly;
pub mod scalar;

pub use combinat::{evaluate_at, qbinomial, qdouble_factorial, qfactorial, qfalling, qnumber, DeformationParams};
pub use gauss::{GInt, GRat};
pub use poly::ZPoly;
pub use scalar::QScalar;
