use super::scalar::QScalar;
use crate::error::{QError, QResult};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;

/// [[n]]_{q^k} = 1 + q^k + … + q^{k(n−1)}.
pub fn qnumber(n: u32, k: i64) -> QScalar {
    if n == 0 {
        return QScalar::zero();
    }
    let lo = k.min(0) * (n as i64 - 1);
    let width = (k.unsigned_abs() as usize) * (n as usize - 1) + 1;
    let mut c = vec![super::gauss::GInt::zero(); width];
    for j in 0..n as i64 {
        c[(k * j - lo) as usize] = &c[(k * j - lo) as usize] + &super::gauss::GInt::one();
    }
    QScalar::from_laurent_coeffs(lo, c)
}

/// [[n]]_{q^k}! = [[1]] [[2]] … [[n]].
pub fn qfactorial(n: u32, k: i64) -> QScalar {
    (1..=n).map(|j| qnumber(j, k)).product()
}

/// Gaussian binomial in base q^k; zero outside 0 ≤ j ≤ n.
pub fn qbinomial(n: i64, j: i64, k: i64) -> QScalar {
    if n < 0 || j < 0 || j > n {
        return QScalar::zero();
    }
    let (n, j) = (n as u32, j as u32);
    let j = j.min(n - j);
    // Multiplicative form keeps every intermediate a polynomial ratio.
    let mut num = QScalar::one();
    for t in 0..j {
        num = &num * &qnumber(n - t, k);
    }
    &num / &qfactorial(j, k)
}

/// [[2k]]!! = [[2k]] [[2k−2]] … [[2]] in base q^b.
pub fn qdouble_factorial(k: u32, b: i64) -> QScalar {
    (1..=k).map(|j| qnumber(2 * j, b)).product()
}

/// Falling product [[n]] [[n−1]] … [[n−m+1]] in base q^k.
pub fn qfalling(n: u32, m: u32, k: i64) -> QScalar {
    if m > n {
        return QScalar::zero();
    }
    (0..m).map(|t| qnumber(n - t, k)).product()
}

/// Numeric evaluation point and truncation order.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationParams {
    pub q_value: BigRational,
    pub truncation_order: u32,
    pub classical: bool,
}

impl DeformationParams {
    pub fn new(q_value: BigRational, truncation_order: u32) -> QResult<Self> {
        let p = DeformationParams { q_value, truncation_order, classical: false };
        p.validate()?;
        Ok(p)
    }

    pub fn classical(truncation_order: u32) -> Self {
        DeformationParams { q_value: BigRational::one(), truncation_order, classical: true }
    }

    pub fn validate(&self) -> QResult<()> {
        if self.q_value <= BigRational::from_integer(0.into()) {
            return Err(QError::InvalidParameter(format!("q must be positive, got {}", self.q_value)));
        }
        if self.q_value.is_one() && !self.classical {
            return Err(QError::InvalidParameter("q = 1 requires classical mode".into()));
        }
        if !self.q_value.is_one() && self.classical {
            return Err(QError::InvalidParameter("classical mode requires q = 1".into()));
        }
        if self.truncation_order == 0 {
            return Err(QError::InvalidParameter("truncation order must be positive".into()));
        }
        Ok(())
    }

    pub fn q_f64(&self) -> f64 {
        super::scalar::rat_to_f64(&self.q_value)
    }
}

pub fn evaluate_at(s: &QScalar, params: &DeformationParams) -> QResult<Complex64> {
    s.eval(&params.q_value)
}
