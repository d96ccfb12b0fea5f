use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("PoleAtQ: denominator vanishes at q = {0}")]
    PoleAtQ(String),
    #[error("OrderingMismatch: expected {expected} ordering, found {found}")]
    OrderingMismatch { expected: String, found: String },
    #[error("OriginSingularity: lattice evaluation touches x = 0")]
    OriginSingularity,
    #[error("BoundaryDominated: boundary fraction {fraction:.3e} exceeds {limit:.3e}")]
    BoundaryDominated { fraction: f64, limit: f64 },
    #[error("TruncationInsufficient: degree {degree} exceeds truncation order {order}")]
    TruncationInsufficient { degree: u32, order: u32 },
    #[error("SeriesDivergent: ratio {0} is not below 1")]
    SeriesDivergent(f64),
    #[error("WindowTooSmall: {0}")]
    WindowTooSmall(String),
    #[error("UnsupportedOrder: order {0} is above the supported maximum")]
    UnsupportedOrder(usize),
    #[error("VariantMismatch: {0}")]
    VariantMismatch(String),
    #[error("BadIndex: unknown index label {0:?}")]
    BadIndex(String),
    #[error("ParseError at {pos}: {msg}")]
    ParseError { pos: usize, msg: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("inconsistent linear system: {0}")]
    Inconsistent(String),
}

pub type QResult<T> = Result<T, QError>;
