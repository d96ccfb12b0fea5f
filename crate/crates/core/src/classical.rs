//! Specialization of q-dependent series at a fixed q and the classical-limit battery.

use crate::algebra::{parse_series, Mono, NSeries, Ordering};
use crate::calculus::{partial_action, DIndex, DerivativeKind};
use crate::error::QResult;
use crate::qcoeff::QScalar;
use crate::qexp::{qinvert, InversionKind};
use crate::star::star_any;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use std::collections::BTreeMap;

/// Replace every coefficient by its exact value at `q`.
pub fn specialize(f: &NSeries, q: &BigRational) -> QResult<NSeries> {
    let mut out = f.same_shape();
    for (m, c) in f.terms() {
        out.add_term(*m, QScalar::from_grat(c.eval_exact(q)?));
    }
    Ok(out)
}

/// Coefficients evaluated in floating point at `q`.
pub fn eval_series(f: &NSeries, q: &BigRational) -> QResult<BTreeMap<Mono, Complex64>> {
    f.terms().map(|(m, c)| Ok((*m, c.eval(q)?))).collect()
}

/// Ordinary partial derivative along axis k (0..3 spatial, 3 time).
pub fn ordinary_partial(f: &NSeries, k: usize) -> NSeries {
    f.map_terms(|m, c| {
        let n = m.get(k);
        (n > 0).then(|| (m.with(k, n - 1), c * &QScalar::from_int(n as i64)))
    })
}

/// f(−x) on the spatial coordinates.
pub fn negate_argument(f: &NSeries) -> NSeries {
    f.map_terms(|m, c| Some((*m, if m.spatial_degree() % 2 == 1 { -c.clone() } else { c.clone() })))
}

/// max |a − b| over coefficients, relative to max |b|.
pub fn relative_deviation(a: &BTreeMap<Mono, Complex64>, b: &BTreeMap<Mono, Complex64>) -> f64 {
    let zero = Complex64::new(0.0, 0.0);
    let scale = b.values().map(|z| z.norm()).fold(0.0, f64::max);
    let diff = a
        .keys()
        .chain(b.keys())
        .map(|m| (a.get(m).unwrap_or(&zero) - b.get(m).unwrap_or(&zero)).norm())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// One deformed operation compared with its classical counterpart.
#[derive(Clone, Debug)]
pub struct ClassicalCheck {
    pub name: String,
    /// Deformed result at q = 1 equals the classical result exactly.
    pub exact_at_one: bool,
    /// Relative deviation of the deformed result at the nearby q from the classical result.
    pub near_deviation: f64,
}

pub const BATTERY: [&str; 6] = [
    "x+ x3 x-",
    "x+^2 x-^2 + 3 x3^2",
    "x3^3 x- - 2 x+ x3",
    "x+^3 + q x3 x-^2 t",
    "1/2 x+ x3^2 x- + i x-",
    "x+^2 x3^2 x-",
];

fn compare(name: String, deformed: &NSeries, classical: &NSeries, near: &BigRational) -> QResult<ClassicalCheck> {
    let one = BigRational::one();
    let at_one = specialize(deformed, &one)?;
    let want = specialize(classical, &one)?;
    let near_deviation = relative_deviation(&eval_series(deformed, near)?, &eval_series(&want, &one)?);
    Ok(ClassicalCheck { name, exact_at_one: at_one == want, near_deviation })
}

/// Star products, derivatives and inversions on a fixed battery, against their
/// commutative counterparts at q = 1 and at the nearby value `near`.
pub fn classical_battery(near: &BigRational) -> QResult<Vec<ClassicalCheck>> {
    let polys: Vec<NSeries> = BATTERY.iter().map(|s| parse_series(s)).collect::<QResult<_>>()?;
    let mut out = Vec::new();
    for (a, f) in polys.iter().enumerate() {
        for (b, g) in polys.iter().enumerate().skip(a) {
            for ord in [Ordering::Standard, Ordering::Reversed] {
                let (f, g) = (f.clone().with_ordering(ord), g.clone().with_ordering(ord));
                let s = star_any(&f, &g)?;
                out.push(compare(format!("star {a}x{b} {}", ord.name()), &s, &f.commutative_mul(&g), near)?);
            }
        }
    }
    let indices = [(DIndex::Plus, 0), (DIndex::Three, 1), (DIndex::Minus, 2), (DIndex::Zero, 3)];
    for (a, f) in polys.iter().enumerate() {
        for (i, k) in indices {
            let d = partial_action(DerivativeKind::left(i), f)?;
            out.push(compare(format!("derivative {i:?} of #{a}"), &d, &ordinary_partial(f, k), near)?);
            let r = f.clone().with_ordering(Ordering::Reversed);
            let d = partial_action(DerivativeKind::hat_left(i), &r)?;
            out.push(compare(format!("hat derivative {i:?} of #{a}"), &d, &ordinary_partial(&r, k), near)?);
        }
    }
    for (a, f) in polys.iter().enumerate() {
        let spatial = f.filter(|m| m.get(3) == 0);
        let r = spatial.clone().with_ordering(Ordering::Reversed);
        let inv = qinvert(&r, InversionKind::Minus)?;
        out.push(compare(format!("inversion of #{a}"), &inv, &negate_argument(&r), near)?);
        let inv = qinvert(&spatial, InversionKind::MinusBar)?;
        out.push(compare(format!("bar inversion of #{a}"), &inv, &negate_argument(&spatial), near)?);
    }
    Ok(out)
}
