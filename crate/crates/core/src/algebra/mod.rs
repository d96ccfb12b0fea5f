//! Normal-ordered series, ordering conventions, conjugation and the rewriting oracle.

pub mod oracle;
pub mod parse;
pub mod series;

pub use oracle::{convert_ordering, normal_order_oracle, normal_order_to, Gen, NCWord};
pub use parse::parse_series;
pub use series::{mono_text, term_text, var_names, Mono, NSeries, Ordering, Space};

use crate::error::{QError, QResult};
use crate::lattice::{LatticeField, LatticeGrid};
use crate::qcoeff::DeformationParams;
use num_complex::Complex64;

/// Evaluate a position series as a commutative polynomial at every lattice point.
pub fn sample_to_lattice(f: &NSeries, grid: &LatticeGrid, params: &DeformationParams) -> QResult<LatticeField> {
    if f.space != Space::Position {
        return Err(QError::InvalidParameter("only position series can be sampled".into()));
    }
    let coeffs: Vec<(Mono, Complex64)> = f
        .terms()
        .map(|(m, c)| Ok((*m, c.eval(&params.q_value)?)))
        .collect::<QResult<_>>()?;
    Ok(LatticeField::from_fn(grid, |x, t| {
        let v = [x[0], x[1], x[2], t];
        coeffs
            .iter()
            .map(|(m, c)| {
                let mut p = *c;
                for k in 0..4 {
                    p *= v[k].powi(m.0[k] as i32);
                }
                p
            })
            .sum()
    }))
}
