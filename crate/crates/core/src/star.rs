//! Star product on normal-ordered series and metric contractions.

use crate::algebra::{Mono, NSeries, Ordering, Space};
use crate::error::{QError, QResult};
use crate::qcoeff::{qbinomial, qfactorial, QScalar};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

type MonoProduct = Vec<(Mono, QScalar)>;

fn cache() -> &'static Mutex<HashMap<(Mono, Mono), MonoProduct>> {
    static C: OnceLock<Mutex<HashMap<(Mono, Mono), MonoProduct>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Star product of two standard-ordered monomials with unit coefficients.
pub fn star_monomials(m: &Mono, n: &Mono) -> MonoProduct {
    if let Some(v) = cache().lock().unwrap().get(&(*m, *n)) {
        return v.clone();
    }
    let [a, b, c, t] = m.0;
    let [a2, b2, c2, t2] = n.0;
    let mut out = Vec::new();
    for k in 0..=c.min(a2) {
        let mut coef = QScalar::lambda().pow(k)
            * qbinomial(c as i64, k as i64, 4)
            * qbinomial(a2 as i64, k as i64, 4)
            * qfactorial(k, 4);
        let e = 2 * (b as i64 * (a2 - k) as i64 + (c - k) as i64 * b2 as i64);
        coef = coef.mul_q_pow(e);
        out.push((Mono([a + a2 - k, b + b2 + 2 * k, c + c2 - k, t + t2]), coef));
    }
    cache().lock().unwrap().insert((*m, *n), out.clone());
    out
}

fn check_pair(f: &NSeries, g: &NSeries, ordering: Ordering) -> QResult<()> {
    if f.space != g.space {
        return Err(QError::InvalidParameter("star product of position and momentum series".into()));
    }
    for s in [f, g] {
        if s.ordering != ordering {
            return Err(QError::OrderingMismatch { expected: ordering.name().into(), found: s.ordering.name().into() });
        }
    }
    Ok(())
}

fn star_standard(f: &NSeries, g: &NSeries) -> NSeries {
    let mut out = NSeries::zero(f.space, Ordering::Standard);
    for (m, c) in f.terms() {
        for (n, d) in g.terms() {
            let cd = c * d;
            for (mm, k) in star_monomials(m, n) {
                out.add_term(mm, &cd * &k);
            }
        }
    }
    out
}

/// f ⋆ g for standard-ordered series.
pub fn star(f: &NSeries, g: &NSeries) -> QResult<NSeries> {
    check_pair(f, g, Ordering::Standard)?;
    Ok(star_standard(f, g))
}

/// f ⋆ g for reversed-ordered series, transported through q → q⁻¹, x⁺ ↔ x⁻.
pub fn star_reversed(f: &NSeries, g: &NSeries) -> QResult<NSeries> {
    check_pair(f, g, Ordering::Reversed)?;
    Ok(star_standard(&f.theta(), &g.theta()).theta())
}

/// Star product in whichever ordering both factors share.
pub fn star_any(f: &NSeries, g: &NSeries) -> QResult<NSeries> {
    match f.ordering {
        Ordering::Standard => star(f, g),
        Ordering::Reversed => star_reversed(f, g),
    }
}

/// Repeated star product f ⋆ … ⋆ f.
pub fn star_pow(f: &NSeries, k: u32) -> QResult<NSeries> {
    let mut acc = NSeries::one(f.space, f.ordering);
    for _ in 0..k {
        acc = star_any(&acc, f)?;
    }
    Ok(acc)
}

/// Vector index in the order (+, 3, −).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Index {
    Plus,
    Three,
    Minus,
}

impl Index {
    pub const ALL: [Index; 3] = [Index::Plus, Index::Three, Index::Minus];

    pub fn slot(self) -> usize {
        match self {
            Index::Plus => 0,
            Index::Three => 1,
            Index::Minus => 2,
        }
    }

    pub fn parse(s: &str) -> QResult<Index> {
        match s {
            "+" => Ok(Index::Plus),
            "3" => Ok(Index::Three),
            "-" | "−" => Ok(Index::Minus),
            _ => Err(QError::BadIndex(s.to_string())),
        }
    }

    /// The index paired with this one by the metric.
    pub fn partner(self) -> Index {
        match self {
            Index::Plus => Index::Minus,
            Index::Three => Index::Three,
            Index::Minus => Index::Plus,
        }
    }
}

/// g_{AB} = g^{AB}, rows and columns ordered (+, 3, −).
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTable {
    pub g: [[QScalar; 3]; 3],
}

impl MetricTable {
    pub fn euclidean() -> Self {
        let z = QScalar::zero;
        MetricTable {
            g: [
                [z(), z(), -QScalar::q()],
                [z(), QScalar::one(), z()],
                [-QScalar::q_pow(-1), z(), z()],
            ],
        }
    }

    pub fn get(&self, a: Index, b: Index) -> &QScalar {
        &self.g[a.slot()][b.slot()]
    }

    /// Σ_B g^{AB} g_{BC}.
    pub fn product(&self) -> [[QScalar; 3]; 3] {
        let mut out: [[QScalar; 3]; 3] = Default::default();
        for a in 0..3 {
            for c in 0..3 {
                out[a][c] = (0..3).map(|b| &self.g[a][b] * &self.g[b][c]).sum();
            }
        }
        out
    }
}

/// Three components carrying an upper or lower index.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexedVector {
    pub comps: [NSeries; 3],
    pub upper: bool,
}

impl IndexedVector {
    /// The coordinate vector (x^A) or (p^A).
    pub fn coordinates(space: Space) -> Self {
        IndexedVector {
            comps: [0, 1, 2].map(|k| NSeries::var(k, space, Ordering::Standard)),
            upper: true,
        }
    }

    pub fn comp(&self, a: Index) -> &NSeries {
        &self.comps[a.slot()]
    }

    fn contract(&self, upper: bool) -> IndexedVector {
        let g = MetricTable::euclidean();
        let comps = Index::ALL.map(|a| {
            let b = a.partner();
            self.comps[b.slot()].scale(g.get(a, b))
        });
        IndexedVector { comps, upper }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContractMode {
    Raise,
    Lower,
    Square,
}

/// Result of a metric contraction: a vector for raise/lower, a series for square.
#[derive(Clone, Debug, PartialEq)]
pub enum Contracted {
    Vector(IndexedVector),
    Scalar(NSeries),
}

/// X_A = g_{AB} X^B, its inverse, or the invariant v^A ⋆ v_A.
pub fn metric_contract(v: &IndexedVector, mode: ContractMode) -> QResult<Contracted> {
    match mode {
        ContractMode::Lower => {
            if !v.upper {
                return Err(QError::BadIndex("vector already carries a lower index".into()));
            }
            Ok(Contracted::Vector(v.contract(false)))
        }
        ContractMode::Raise => {
            if v.upper {
                return Err(QError::BadIndex("vector already carries an upper index".into()));
            }
            Ok(Contracted::Vector(v.contract(true)))
        }
        ContractMode::Square => {
            let (up, low) = if v.upper { (v.clone(), v.contract(false)) } else { (v.contract(true), v.clone()) };
            let mut acc = NSeries::zero(v.comps[0].space, v.comps[0].ordering);
            for a in Index::ALL {
                acc = acc.add(&star_any(up.comp(a), low.comp(a))?);
            }
            Ok(Contracted::Scalar(acc))
        }
    }
}

/// Lower a single labelled component: returns X_A as a multiple of the partner coordinate.
pub fn lower_label(label: &str, space: Space) -> QResult<NSeries> {
    let a = Index::parse(label)?;
    let g = MetricTable::euclidean();
    let b = a.partner();
    Ok(NSeries::var(b.slot(), space, Ordering::Standard).scale(g.get(a, b)))
}

/// p² = q⁻²(p³)² − λ₊ p⁺p⁻.
pub fn p_squared() -> NSeries {
    p_squared_power(1)
}

/// Closed form of the k-th star power of p².
pub fn p_squared_power(k: u32) -> NSeries {
    let mut out = NSeries::zero(Space::Momentum, Ordering::Standard);
    let neg_lp = -QScalar::lambda_plus();
    for l in 0..=k {
        let c = neg_lp.pow(k - l).mul_q_pow(-2 * l as i64) * qbinomial(k as i64, l as i64, 4);
        out.add_term(Mono::spatial(k - l, 2 * l, k - l), c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_series;

    fn s(t: &str) -> NSeries {
        parse_series(t).unwrap()
    }

    #[test]
    fn basic_relations() {
        assert_eq!(star(&s("x3"), &s("x+")).unwrap(), s("q^2 x+ x3"));
        assert_eq!(star(&s("x-"), &s("x+")).unwrap(), s("x+ x- + lambda x3^2"));
        assert_eq!(star(&s("x-"), &s("x3")).unwrap(), s("q^2 x3 x-"));
        assert_eq!(star(&s("1"), &s("x+ x3 - t")).unwrap(), s("x+ x3 - t"));
    }

    #[test]
    fn metric_inverse_and_square() {
        let g = MetricTable::euclidean();
        let p = g.product();
        for a in 0..3 {
            for c in 0..3 {
                assert_eq!(p[a][c], if a == c { QScalar::one() } else { QScalar::zero() });
            }
        }
        let v = IndexedVector::coordinates(Space::Momentum);
        match metric_contract(&v, ContractMode::Square).unwrap() {
            Contracted::Scalar(sq) => assert_eq!(sq, s("q^-2 p3^2 - (q + q^-1) p+ p-")),
            _ => unreachable!(),
        }
        assert_eq!(lower_label("+", Space::Momentum).unwrap(), s("-q p-"));
        assert_eq!(lower_label("-", Space::Momentum).unwrap(), s("-q^-1 p+"));
        assert!(matches!(lower_label("7", Space::Momentum), Err(QError::BadIndex(_))));
    }

    #[test]
    fn p_squared_powers_match_star_powers() {
        let p2 = p_squared();
        for k in 0..=3 {
            assert_eq!(p_squared_power(k), star_pow(&p2, k).unwrap(), "k = {k}");
        }
    }
}
