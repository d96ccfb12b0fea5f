//! Jackson derivatives and integrals, partial-derivative actions and their inverses.

use crate::algebra::{NSeries, Ordering};
use crate::error::{QError, QResult};
use crate::lattice::{Axis, LatticeField};
use crate::qcoeff::{qnumber, QScalar};
use num_complex::Complex64;

/// Plain ∂ (standard order) or hatted ∂̂ (reversed order).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Plain,
    Hat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DIndex {
    Plus,
    Three,
    Minus,
    Zero,
}

impl DIndex {
    pub const SPATIAL: [DIndex; 3] = [DIndex::Plus, DIndex::Three, DIndex::Minus];

    fn swap(self) -> DIndex {
        match self {
            DIndex::Plus => DIndex::Minus,
            DIndex::Minus => DIndex::Plus,
            i => i,
        }
    }

    pub fn parse(s: &str) -> QResult<DIndex> {
        match s {
            "+" => Ok(DIndex::Plus),
            "3" => Ok(DIndex::Three),
            "-" => Ok(DIndex::Minus),
            "0" | "t" => Ok(DIndex::Zero),
            _ => Err(QError::BadIndex(s.to_string())),
        }
    }
}

/// g_{A,partner(A)}; the time index is unaffected.
fn metric_factor(i: DIndex) -> QScalar {
    match i {
        DIndex::Plus => -QScalar::q(),
        DIndex::Minus => -QScalar::q_pow(-1),
        _ => QScalar::one(),
    }
}

/// Which derivative, from which side, with the index up or down.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DerivativeKind {
    pub family: Family,
    pub side: Side,
    pub index: DIndex,
    pub upper: bool,
}

impl DerivativeKind {
    /// ∂_A ▷
    pub fn left(index: DIndex) -> Self {
        DerivativeKind { family: Family::Plain, side: Side::Left, index, upper: false }
    }

    /// ∂̂_A ▷̄
    pub fn hat_left(index: DIndex) -> Self {
        DerivativeKind { family: Family::Hat, side: Side::Left, index, upper: false }
    }

    /// ◁̄ ∂^A
    pub fn right(index: DIndex) -> Self {
        DerivativeKind { family: Family::Plain, side: Side::Right, index, upper: true }
    }

    /// ◁ ∂̂^A
    pub fn hat_right(index: DIndex) -> Self {
        DerivativeKind { family: Family::Hat, side: Side::Right, index, upper: true }
    }

    pub fn raised(mut self) -> Self {
        self.upper = true;
        self
    }

    pub fn lowered(mut self) -> Self {
        self.upper = false;
        self
    }

    pub fn ordering(&self) -> Ordering {
        match self.family {
            Family::Plain => Ordering::Standard,
            Family::Hat => Ordering::Reversed,
        }
    }
}

/// D_{q^k, x}: xⁿ ↦ [[n]]_{q^k} xⁿ⁻¹ on axis `axis` (0,1,2 spatial).
pub fn jackson_d(f: &NSeries, axis: usize, k: i64) -> NSeries {
    f.map_terms(|m, c| {
        let n = m.get(axis);
        (n > 0).then(|| (m.with(axis, n - 1), c * &qnumber(n, k)))
    })
}

/// Inverse Jackson derivative on monomials: xⁿ ↦ xⁿ⁺¹/[[n+1]]_{q^k}.
pub fn jackson_d_inv(f: &NSeries, axis: usize, k: i64) -> NSeries {
    f.map_terms(|m, c| {
        let n = m.get(axis) + 1;
        Some((m.with(axis, n), c * &qnumber(n, k).inv().expect("q-number of positive n is nonzero")))
    })
}

fn times_var(f: &NSeries, axis: usize) -> NSeries {
    f.map_terms(|m, c| Some((m.with(axis, m.get(axis) + 1), c.clone())))
}

fn d_time(f: &NSeries) -> NSeries {
    f.map_terms(|m, c| {
        let n = m.get(3);
        (n > 0).then(|| (m.with(3, n - 1), c * &QScalar::from_int(n as i64)))
    })
}

fn d_time_inv(f: &NSeries) -> NSeries {
    f.map_terms(|m, c| {
        let n = m.get(3) + 1;
        Some((m.with(3, n), c * &QScalar::from_ratio(1, n as i64)))
    })
}

/// The correction term λ x⁺ D²_{q², x³} of ∂₋.
fn minus_correction(f: &NSeries) -> NSeries {
    times_var(&jackson_d(&jackson_d(f, 1, 2), 1, 2), 0).scale(&QScalar::lambda())
}

/// ∂_A ▷ f on a standard-ordered series, lower index.
fn plain_left_lower(i: DIndex, f: &NSeries) -> NSeries {
    match i {
        DIndex::Plus => jackson_d(f, 0, 4),
        DIndex::Three => jackson_d(&f.scale_operator(0, 2), 1, 2),
        DIndex::Minus => jackson_d(&f.scale_operator(1, 2), 2, 4).add(&minus_correction(f)),
        DIndex::Zero => d_time(f),
    }
}

/// ∂̂_A ▷̄ F on a reversed-ordered series: q → q⁻¹ with + ↔ −.
fn hat_left_lower(i: DIndex, f: &NSeries) -> NSeries {
    plain_left_lower(i.swap(), &f.theta()).theta()
}

fn left_lower(family: Family, i: DIndex, f: &NSeries) -> NSeries {
    match family {
        Family::Plain => plain_left_lower(i, f),
        Family::Hat => hat_left_lower(i, f),
    }
}

fn left_action(family: Family, i: DIndex, upper: bool, f: &NSeries) -> NSeries {
    if upper {
        left_lower(family, i.swap(), f).scale(&metric_factor(i))
    } else {
        left_lower(family, i, f)
    }
}

/// f ◁̄ ∂^A = −conj(∂_A ▷ conj f), and the hatted analogue.
fn right_action(family: Family, i: DIndex, upper: bool, f: &NSeries) -> NSeries {
    if upper {
        left_lower(family, i, &f.conjugate()).conjugate().neg()
    } else {
        right_action(family, i.swap(), true, f).scale(&metric_factor(i))
    }
}

/// Apply a partial derivative through its operator representation.
pub fn partial_action(kind: DerivativeKind, f: &NSeries) -> QResult<NSeries> {
    let want = kind.ordering();
    if f.ordering != want {
        return Err(QError::OrderingMismatch { expected: want.name().into(), found: f.ordering.name().into() });
    }
    Ok(match kind.side {
        Side::Left => left_action(kind.family, kind.index, kind.upper, f),
        Side::Right => right_action(kind.family, kind.index, kind.upper, f),
    })
}

/// (∂_A)⁻¹ ▷ f for a standard-ordered polynomial, lower index.
fn plain_inverse_lower(i: DIndex, f: &NSeries) -> NSeries {
    match i {
        DIndex::Plus => jackson_d_inv(f, 0, 4),
        DIndex::Three => jackson_d_inv(&f.scale_operator(0, -2), 1, 2),
        DIndex::Zero => d_time_inv(f),
        DIndex::Minus => {
            // Σ_k [−cla⁻¹ cor]^k cla⁻¹ f with cla = D_{q⁴,x⁻}∘(x³ → q²x³)
            let cla_inv = |g: &NSeries| jackson_d_inv(g, 2, 4).scale_operator(1, -2);
            let mut term = cla_inv(f);
            let mut acc = term.clone();
            while !term.is_zero() {
                term = cla_inv(&minus_correction(&term)).neg();
                acc = acc.add(&term);
            }
            acc
        }
    }
}

/// Inverse of a left action on polynomials.
pub fn inverse_partial(kind: DerivativeKind, f: &NSeries) -> QResult<NSeries> {
    if kind.side != Side::Left {
        return Err(QError::InvalidParameter("inverse derivatives are defined for left actions".into()));
    }
    let want = kind.ordering();
    if f.ordering != want {
        return Err(QError::OrderingMismatch { expected: want.name().into(), found: f.ordering.name().into() });
    }
    let (i, scale) = if kind.upper {
        (kind.index.swap(), metric_factor(kind.index).inv()?)
    } else {
        (kind.index, QScalar::one())
    };
    let out = match kind.family {
        Family::Plain => plain_inverse_lower(i, f),
        Family::Hat => plain_inverse_lower(i.swap(), &f.theta()).theta(),
    };
    Ok(out.scale(&scale))
}

/// Explicit closed form of (∂₋)⁻¹ as a sum over k with rescaled arguments.
pub fn inverse_minus_closed_form(f: &NSeries) -> NSeries {
    let mut acc = f.same_shape();
    let mut k = 0u32;
    loop {
        let mut g = jackson_d_inv(&f.scale_operator(1, -2 * (k as i64 + 1)), 2, 4);
        for _ in 0..k {
            g = jackson_d(&jackson_d(&g, 1, 2), 1, 2);
            g = times_var(&jackson_d_inv(&g, 2, 4), 0).scale(&-QScalar::lambda());
        }
        if g.is_zero() {
            return acc;
        }
        let kk = k as i64;
        acc = acc.add(&g.scale(&QScalar::q_pow(2 * kk * (kk + 1))));
        k += 1;
    }
}

/// Lattice Jackson derivative (f(q^k x) − f(x)) / ((q^k − 1) x) along one axis.
/// Points whose shifted neighbour falls outside the grid are reported as invalid.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskedField {
    pub field: LatticeField,
    pub valid: Vec<bool>,
}

pub fn jackson_d_lattice(f: &LatticeField, axis: Axis, k: i64) -> QResult<MaskedField> {
    let g = &f.grid.space;
    let step = g.axes[axis.index()].step as i64;
    if k == 0 {
        return Err(QError::OriginSingularity);
    }
    if k % step != 0 {
        return Err(QError::InvalidParameter(format!("q^{k} shift is not a multiple of the axis ratio q^{step}")));
    }
    let steps = (k / step) as i32;
    let qk = crate::lattice::q_ratio_f64(&g.q, k);
    let coords = g.coords(axis);
    let n = g.npoints();
    let mut out = LatticeField::zeros(&f.grid);
    let mut valid = vec![false; n];
    for p in 0..n {
        let idx = g.unflat(p);
        let x = coords[idx[axis.index()]];
        if x == 0.0 {
            return Err(QError::OriginSingularity);
        }
        if let Some(j) = g.shift(axis, idx[axis.index()], steps) {
            let mut idx2 = idx;
            idx2[axis.index()] = j;
            let p2 = g.flat(idx2);
            valid[p] = true;
            for s in 0..f.grid.time.n {
                out.values[s * n + p] = (f.at(s, p2) - f.at(s, p)) / ((qk - 1.0) * x);
            }
        }
    }
    Ok(MaskedField { field: out, valid })
}

/// Default limit on the share of Σ w|f| carried by the outermost shells.
pub const DEFAULT_BOUNDARY_FRACTION: f64 = 1e-6;

/// Triple Jackson sum over the grid at one time slice.
pub fn integrate_space(f: &LatticeField, slice: usize, boundary_limit: f64) -> QResult<Complex64> {
    let g = &f.grid.space;
    let w = g.point_weights();
    let vals = f.slice(slice);
    let frac = g.boundary_fraction(vals, &w);
    if frac > boundary_limit {
        return Err(QError::BoundaryDominated { fraction: frac, limit: boundary_limit });
    }
    Ok(weighted_sum(vals, &w))
}

/// Σ w_i v_i in index order.
pub fn weighted_sum(vals: &[Complex64], w: &[f64]) -> Complex64 {
    vals.iter().zip(w).map(|(v, w)| v * w).sum()
}
