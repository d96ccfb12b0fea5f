//! q-translations, q-inversions and the braided Hopf laws they satisfy.

use super::bi::BiSeries;
use super::{build_exp, lower_factor, i_power, ExpVariant};
use crate::algebra::{convert_ordering, Mono, NSeries, Ordering, Space};
use crate::calculus::{jackson_d, partial_action, DIndex, DerivativeKind};
use crate::error::{QError, QResult};
use crate::qcoeff::{qdouble_factorial, qfactorial, QScalar};
use crate::star::star_any;
use std::collections::HashMap;

/// ⊕ (hatted derivatives, reversed order) or ⊕̄ (plain derivatives, standard order).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TranslationKind {
    Plus,
    PlusBar,
}

/// ⊖ pairs with ⊕, ⊖̄ with ⊕̄.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InversionKind {
    Minus,
    MinusBar,
}

impl TranslationKind {
    pub fn ordering(self) -> Ordering {
        match self {
            TranslationKind::Plus => Ordering::Reversed,
            TranslationKind::PlusBar => Ordering::Standard,
        }
    }

    pub fn inversion(self) -> InversionKind {
        match self {
            TranslationKind::Plus => InversionKind::Minus,
            TranslationKind::PlusBar => InversionKind::MinusBar,
        }
    }
}

impl InversionKind {
    pub fn ordering(self) -> Ordering {
        match self {
            InversionKind::Minus => Ordering::Reversed,
            InversionKind::MinusBar => Ordering::Standard,
        }
    }
}

fn check_ordering(f: &NSeries, want: Ordering) -> QResult<()> {
    if f.ordering != want {
        return Err(QError::OrderingMismatch { expected: want.name().into(), found: f.ordering.name().into() });
    }
    if f.space != Space::Position {
        return Err(QError::InvalidParameter("translations act on position series".into()));
    }
    Ok(())
}

/// f(x ⊕ y) or f(x ⊕̄ y) as a series in (x, y), obtained by replacing the momenta of
/// the truncated exponential exp̄_q(x|ip) or exp_q(x|ip) with derivatives in y.
pub fn translate(f: &NSeries, kind: TranslationKind, n: u32) -> QResult<BiSeries> {
    check_ordering(f, kind.ordering())?;
    let deg = f.spatial_degree();
    if deg > n {
        return Err(QError::TruncationInsufficient { degree: deg, order: n });
    }
    let (variant, mk): (ExpVariant, fn(DIndex) -> DerivativeKind) = match kind {
        TranslationKind::PlusBar => (ExpVariant::Exp, DerivativeKind::left),
        TranslationKind::Plus => (ExpVariant::ExpBar, DerivativeKind::hat_left),
    };
    let e = build_exp(variant, false, n)?;
    let ord = kind.ordering();
    let mut out = BiSeries::zero((Space::Position, ord), (Space::Position, ord));
    let mut cache: HashMap<(u32, u32, u32), NSeries> = HashMap::new();
    cache.insert((0, 0, 0), f.clone());
    // Operator words in lower indices. Standard momenta (p⁺)^α(p³)^β(p⁻)^γ give ∂₋^α ∂₃^β ∂₊^γ
    // with ∂₊ acting first; reversed momenta give ∂₊^γ ∂₃^β ∂₋^α with ∂₋ acting first.
    let word = |a: u32, b: u32, c: u32, cache: &mut HashMap<(u32, u32, u32), NSeries>| -> QResult<NSeries> {
        let stages: [(DIndex, u32); 3] = match ord {
            Ordering::Standard => [(DIndex::Plus, c), (DIndex::Three, b), (DIndex::Minus, a)],
            Ordering::Reversed => [(DIndex::Minus, a), (DIndex::Three, b), (DIndex::Plus, c)],
        };
        let key = |k: usize, e: u32| -> (u32, u32, u32) {
            let mut v = [0u32; 3];
            for (j, s) in stages.iter().enumerate().take(k) {
                v[j] = s.1;
            }
            v[k] = e;
            (v[0], v[1], v[2])
        };
        let mut cur = f.clone();
        for (k, (idx, times)) in stages.iter().enumerate() {
            for e in 1..=*times {
                let kk = key(k, e);
                cur = match cache.get(&kk) {
                    Some(v) => v.clone(),
                    None => {
                        let v = partial_action(mk(*idx), &cur)?;
                        cache.insert(kk, v.clone());
                        v
                    }
                };
            }
        }
        Ok(cur)
    };
    for ((xm, pm), c) in e.series.terms() {
        let [a, b, cc, _] = pm.0;
        if a + b + cc > deg {
            continue;
        }
        let g = word(a, b, cc, &mut cache)?;
        if g.is_zero() {
            continue;
        }
        let coef = &(c * &lower_factor(cc, a)) * &i_power(a + b + cc, true);
        for (ym, d) in g.terms() {
            out.add_term(*xm, *ym, &coef * d);
        }
    }
    Ok(out)
}

/// Closed double-sum formula for f(x ⊕ y), f in reversed order.
pub fn translate_explicit(f: &NSeries) -> QResult<BiSeries> {
    check_ordering(f, Ordering::Reversed)?;
    let deg = f.spatial_degree();
    let mut out = BiSeries::zero((Space::Position, Ordering::Reversed), (Space::Position, Ordering::Reversed));
    let base = -(&(&QScalar::q_pow(-1) * &QScalar::lambda()) * &QScalar::lambda_plus());
    for ip in 0..=deg {
        for i3 in 0..=deg - ip {
            for im in 0..=deg - ip - i3 {
                for k in 0..=i3 {
                    let mut g = f.clone();
                    for _ in 0..im {
                        g = jackson_d(&g, 2, -4);
                    }
                    for _ in 0..i3 + k {
                        g = jackson_d(&g, 1, -2);
                    }
                    for _ in 0..ip {
                        g = jackson_d(&g, 0, -4);
                    }
                    if g.is_zero() {
                        continue;
                    }
                    let g = g.scale_operator(2, 2 * (k as i64 - i3 as i64)).scale_operator(1, -2 * ip as i64);
                    let denom = &(&(&qdouble_factorial(k, -2) * &qfactorial(im, -4)) * &qfactorial(i3 - k, -2))
                        * &qfactorial(ip, -4);
                    let coef = &base.pow(k) / &denom;
                    let xm = Mono::spatial(ip + k, i3 - k, im);
                    for (ym, d) in g.terms() {
                        out.add_term(xm, ym.with(2, ym.get(2) + k), &coef * d);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn u_operator(f: &NSeries, s: i64) -> NSeries {
    let mut acc = f.same_shape();
    let mut k = 0u32;
    loop {
        let mut g = f.clone();
        for _ in 0..k {
            g = jackson_d(&jackson_d(&g, 0, 4 * s), 2, 4 * s);
        }
        if g.is_zero() {
            return acc;
        }
        let kk = k as i64;
        let lam = if s > 0 { QScalar::lambda() } else { -QScalar::lambda() };
        let coef = &lam.pow(k) / &qfactorial(k, 4 * s);
        let g = g.map_terms(|m, c| {
            let e = 2 * s * m.get(1) as i64 * (m.get(0) as i64 + m.get(2) as i64 + kk);
            Some((m.with(1, m.get(1) + 2 * k), &c.mul_q_pow(e) * &coef))
        });
        acc = acc.add(&g);
        k += 1;
    }
}

/// Û: standard-order representation to reversed-order representation.
pub fn u_hat(f: &NSeries) -> NSeries {
    u_operator(f, -1).with_ordering(Ordering::Reversed)
}

/// Û⁻¹: reversed-order representation to standard-order representation.
pub fn u_hat_inv(f: &NSeries) -> NSeries {
    u_operator(f, 1).with_ordering(Ordering::Standard)
}

/// Right-hand side of the Û⁻¹ f(⊖x) series for f in reversed order.
/// The arguments are rescaled first and the x³ derivatives act on the rescaled function.
fn inversion_series(f: &NSeries) -> NSeries {
    let deg = f.spatial_degree();
    let base = -(&(&QScalar::q() * &QScalar::lambda()) * &QScalar::lambda_plus());
    let mut acc = NSeries::zero(Space::Position, Ordering::Standard);
    for i in 0..=deg / 2 {
        let ii = i as i64;
        let subst = |g: &NSeries| {
            g.map_terms(|m, c| {
                let [a, b, cc, _] = m.0;
                let e = (2 - 4 * ii) * (a + cc) as i64 + (1 - 2 * ii) * b as i64;
                let c = c.mul_q_pow(e);
                Some((*m, if (a + b + cc) % 2 == 1 { -c } else { c }))
            })
        };
        let mut g = subst(&f.clone().with_ordering(Ordering::Standard));
        for _ in 0..2 * i {
            g = jackson_d(&g, 1, -2);
        }
        let g = g.map_terms(|m, c| {
            let [a, b, cc, _] = m.0;
            let (a, b, cc) = (a as i64, b as i64, cc as i64);
            let e = -2 * a * (a + b) - 2 * cc * (cc + b) - b * b;
            Some((m.with(0, m.get(0) + i).with(2, m.get(2) + i), c.mul_q_pow(e)))
        });
        acc = acc.add(&g.scale(&(&base.pow(i) / &qdouble_factorial(i, -2))));
    }
    acc
}

/// f(⊖x) for f in reversed order, or f(⊖̄x) for f in standard order.
/// The result is in the same ordering as the input.
pub fn qinvert(f: &NSeries, kind: InversionKind) -> QResult<NSeries> {
    check_ordering(f, kind.ordering())?;
    Ok(match kind {
        InversionKind::Minus => u_hat(&inversion_series(f)),
        InversionKind::MinusBar => qinvert(&f.theta(), InversionKind::Minus)?.theta(),
    })
}

fn product(a: &NSeries, b: &NSeries) -> QResult<NSeries> {
    let ord = a.ordering;
    star_any(a, &convert_ordering(b, ord))
}

/// m ∘ (S ⊗ id) ∘ Δ and m ∘ (id ⊗ S) ∘ Δ minus ε, for f in the translation's ordering.
pub fn antipode_defect(f: &NSeries, kind: TranslationKind, n: u32) -> QResult<(NSeries, NSeries)> {
    let t = translate(f, kind, n)?;
    let inv = kind.inversion();
    let ord = kind.ordering();
    let f0 = NSeries::constant(f.coeff(&Mono::ONE), Space::Position, ord);
    let mut left = NSeries::zero(Space::Position, ord);
    for (ym, col) in t.columns() {
        let s = qinvert(&col, inv)?;
        left = left.add(&product(&s, &NSeries::monomial(ym, QScalar::one(), Space::Position, ord))?);
    }
    let mut right = NSeries::zero(Space::Position, ord);
    for (xm, row) in t.rows() {
        let s = qinvert(&row, inv)?;
        right = right.add(&product(&NSeries::monomial(xm, QScalar::one(), Space::Position, ord), &s)?);
    }
    Ok((left.sub(&f0), right.sub(&f0)))
}

/// f(x ⊕ y)|_{y=0} − f(x) and f(y ⊕ x)|_{y=0} − f(x).
pub fn counit_defect(f: &NSeries, kind: TranslationKind, n: u32) -> QResult<(NSeries, NSeries)> {
    let t = translate(f, kind, n)?;
    Ok((t.second_at_zero().sub(f), t.first_at_zero().sub(f)))
}

/// exp(x ⊕̄ y|ip) − Σ f_m(x) g_n(y) (P_n ⋆ P_m), up to momentum degree n
/// (and the barred analogue with ⊕). Returned as a map from y-monomial to the x ⊗ p defect.
pub fn addition_theorem_defect(kind: TranslationKind, n: u32) -> QResult<Vec<(Mono, BiSeries)>> {
    let variant = match kind {
        TranslationKind::PlusBar => ExpVariant::Exp,
        TranslationKind::Plus => ExpVariant::ExpBar,
    };
    let e = build_exp(variant, false, n)?;
    let xs = e.series.first;
    let ps = e.series.second;
    // Left side: translate every momentum column.
    let mut lhs: HashMap<Mono, BiSeries> = HashMap::new();
    for (pm, col) in e.series.columns() {
        let t = translate(&col, kind, n)?;
        for ((xm, ym), c) in t.terms() {
            lhs.entry(*ym).or_insert_with(|| BiSeries::zero(xs, ps)).add_term(*xm, pm, c.clone());
        }
    }
    // Right side: Σ f_m(x) g_n(y) P_n ⋆ P_m.
    let mut rhs: HashMap<Mono, BiSeries> = HashMap::new();
    for ((xm, pm), c) in e.series.terms() {
        for ((ym, pn), d) in e.series.terms() {
            if pm.degree() + pn.degree() > n {
                continue;
            }
            let prod = star_any(
                &NSeries::monomial(*pn, QScalar::one(), Space::Momentum, ps.1),
                &NSeries::monomial(*pm, QScalar::one(), Space::Momentum, ps.1),
            )?;
            let cd = c * d;
            for (pk, v) in prod.terms() {
                rhs.entry(*ym).or_insert_with(|| BiSeries::zero(xs, ps)).add_term(*xm, *pk, &cd * v);
            }
        }
    }
    let mut keys: Vec<Mono> = lhs.keys().chain(rhs.keys()).cloned().collect();
    keys.sort();
    keys.dedup();
    let zero = BiSeries::zero(xs, ps);
    let mut out = Vec::new();
    for k in keys {
        let l = lhs.get(&k).unwrap_or(&zero).filter(|_, p| p.degree() <= n);
        let r = rhs.get(&k).unwrap_or(&zero);
        let d = l.sub(r).filter(|xm, p| p.degree() <= n && xm.degree() + k.degree() <= n);
        if !d.is_zero() {
            out.push((k, d));
        }
    }
    Ok(out)
}

/// exp_q(x ⊕̄ (⊖̄x)|ip) − 1 (or the barred analogue), per momentum monomial.
pub fn inverse_exp_defect(kind: TranslationKind, n: u32) -> QResult<BiSeries> {
    let variant = match kind {
        TranslationKind::PlusBar => ExpVariant::Exp,
        TranslationKind::Plus => ExpVariant::ExpBar,
    };
    let e = build_exp(variant, false, n)?;
    let mut out = BiSeries::zero(e.series.first, e.series.second);
    for (pm, col) in e.series.columns() {
        let (_, right) = antipode_defect(&col, kind, n)?;
        for (xm, c) in right.terms() {
            out.add_term(*xm, pm, c.clone());
        }
    }
    Ok(out)
}
