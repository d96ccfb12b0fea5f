//! Truncated q-exponentials, q-translations, q-inversions and their laws.

mod bi;
mod hopf;

pub use bi::{monomials_of_degree, BiSeries, Shape};
pub use hopf::{
    addition_theorem_defect, antipode_defect, counit_defect, inverse_exp_defect, qinvert, translate,
    translate_explicit, u_hat, u_hat_inv, InversionKind, TranslationKind,
};

use crate::algebra::{Mono, NSeries, Ordering, Space};
use crate::calculus::{partial_action, DIndex, DerivativeKind, Family, Side};
use crate::error::QResult;
use crate::qcoeff::linalg::{solve_exact, SparseRow};
use crate::qcoeff::{qfactorial, QScalar};
use crate::star::star_any;
use std::collections::BTreeMap;

/// Default truncation order for exponentials.
pub const DEFAULT_ORDER: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExpVariant {
    /// exp_q
    Exp,
    /// exp̄_q
    ExpBar,
    /// exp*_q
    ExpStar,
    /// exp̄*_q
    ExpBarStar,
}

impl ExpVariant {
    pub const ALL: [ExpVariant; 4] = [ExpVariant::Exp, ExpVariant::ExpBar, ExpVariant::ExpStar, ExpVariant::ExpBarStar];

    pub fn name(self) -> &'static str {
        match self {
            ExpVariant::Exp => "exp",
            ExpVariant::ExpBar => "exp-bar",
            ExpVariant::ExpStar => "exp-star",
            ExpVariant::ExpBarStar => "exp-bar-star",
        }
    }
}

/// The eigenvalue equation a variant obeys.
///
/// Left: ∂^A ▷ E = i E ⋆ p^A.  Right: E ◁ ∂^A = i p^A ⋆ E.
/// The derivative family fixes the position ordering; `p_ordering` fixes the momentum star.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EigenRule {
    pub family: Family,
    pub side: Side,
    pub p_ordering: Ordering,
}

impl EigenRule {
    pub fn of(variant: ExpVariant, momentum_first: bool) -> Self {
        let side = if momentum_first { Side::Right } else { Side::Left };
        let (family, p_ordering) = match variant {
            ExpVariant::Exp => (Family::Plain, Ordering::Standard),
            ExpVariant::ExpBar => (Family::Hat, Ordering::Reversed),
            ExpVariant::ExpStar => (Family::Hat, Ordering::Standard),
            ExpVariant::ExpBarStar => (Family::Plain, Ordering::Reversed),
        };
        EigenRule { family, side, p_ordering }
    }

    pub fn x_ordering(&self) -> Ordering {
        match self.family {
            Family::Plain => Ordering::Standard,
            Family::Hat => Ordering::Reversed,
        }
    }

    fn kind(&self, a: DIndex) -> DerivativeKind {
        DerivativeKind { family: self.family, side: self.side, index: a, upper: true }
    }

    fn shape(&self) -> (Shape, Shape) {
        ((Space::Position, self.x_ordering()), (Space::Momentum, self.p_ordering))
    }

    /// Apply the derivative to the position factor.
    fn act(&self, a: DIndex, e: &BiSeries) -> QResult<BiSeries> {
        let kind = self.kind(a);
        e.map_first(e.first, |f| partial_action(kind, f))
    }

    /// i E ⋆ p^A (left rule) or i p^A ⋆ E (right rule), in the momentum factor.
    fn eigenvalue(&self, a: DIndex, e: &BiSeries) -> QResult<BiSeries> {
        let p = NSeries::var(slot(a), Space::Momentum, self.p_ordering);
        let side = self.side;
        e.map_second(e.second, |g| {
            let g = g.clone().with_ordering(self.p_ordering);
            match side {
                Side::Left => star_any(&g, &p),
                Side::Right => star_any(&p, &g),
            }
        })
        .map(|b| b.scale(&QScalar::i()))
    }
}

fn slot(a: DIndex) -> usize {
    match a {
        DIndex::Plus => 0,
        DIndex::Three => 1,
        DIndex::Minus => 2,
        DIndex::Zero => 3,
    }
}

/// A truncated q-exponential: position factor first, momentum factor (upper index) second.
#[derive(Clone, Debug, PartialEq)]
pub struct QExponential {
    pub variant: ExpVariant,
    pub momentum_first: bool,
    pub order: u32,
    pub series: BiSeries,
}

/// Signed metric factors: x₋ = −q⁻¹x⁺, x₊ = −q x⁻ (same for momenta).
fn lower_factor(n_minus_lower: u32, n_plus_lower: u32) -> QScalar {
    let mut c = QScalar::q_pow(n_plus_lower as i64 - n_minus_lower as i64);
    if (n_plus_lower + n_minus_lower) % 2 == 1 {
        c = -c;
    }
    c
}

fn factorials(a: u32, b: u32, c: u32) -> QScalar {
    &(&qfactorial(a, 4) * &qfactorial(b, 2)) * &qfactorial(c, 4)
}

fn i_power(n: u32, inverse: bool) -> QScalar {
    let k = if inverse { (4 - n % 4) % 4 } else { n % 4 };
    QScalar::one().mul_i_pow(k)
}

/// exp_q(x|ip) = Σ x⁺^a x³^b x⁻^c (ip₋)^c (ip₃)^b (ip₊)^a / factorials.
fn exp_position_first(n: u32) -> BiSeries {
    let mut s = BiSeries::zero((Space::Position, Ordering::Standard), (Space::Momentum, Ordering::Standard));
    for d in 0..=n {
        for m in monomials_of_degree(d) {
            let [a, b, c, _] = m.0;
            let coef = &(&i_power(d, false) * &lower_factor(c, a)) / &factorials(a, b, c);
            s.add_term(m, Mono::spatial(c, b, a), coef);
        }
    }
    s
}

/// exp_q(i⁻¹p|x) = Σ (i⁻¹p⁺)^a (i⁻¹p³)^b (i⁻¹p⁻)^c (x₋)^c (x₃)^b (x₊)^a / factorials.
fn exp_momentum_first(n: u32) -> BiSeries {
    let mut s = BiSeries::zero((Space::Position, Ordering::Standard), (Space::Momentum, Ordering::Standard));
    for d in 0..=n {
        for m in monomials_of_degree(d) {
            let [a, b, c, _] = m.0;
            let coef = &(&i_power(d, true) * &lower_factor(c, a)) / &factorials(a, b, c);
            s.add_term(Mono::spatial(c, b, a), m, coef);
        }
    }
    s
}

/// Build a truncated exponential. Closed forms for exp and exp̄; the starred
/// variants are solved degree by degree from their eigenvalue equations.
pub fn build_exp(variant: ExpVariant, momentum_first: bool, n: u32) -> QResult<QExponential> {
    let series = match variant {
        ExpVariant::Exp => closed_form(momentum_first, n),
        ExpVariant::ExpBar => closed_form(momentum_first, n).theta(),
        ExpVariant::ExpStar | ExpVariant::ExpBarStar => solve_eigen(EigenRule::of(variant, momentum_first), n)?,
    };
    Ok(QExponential { variant, momentum_first, order: n, series })
}

fn closed_form(momentum_first: bool, n: u32) -> BiSeries {
    if momentum_first {
        exp_momentum_first(n)
    } else {
        exp_position_first(n)
    }
}

impl QExponential {
    pub fn rule(&self) -> EigenRule {
        EigenRule::of(self.variant, self.momentum_first)
    }

    /// Coefficient of a position monomial times an upper-index momentum monomial.
    pub fn coeff(&self, x: &Mono, p: &Mono) -> QScalar {
        self.series.coeff(x, p)
    }

    /// Coefficient with respect to the lower-index momentum monomial
    /// (p₋)^{n₋}(p₃)^{n₃}(p₊)^{n₊}, given as exponents (n₊, n₃, n₋).
    pub fn coeff_lower(&self, x: &Mono, p_lower: &Mono) -> QScalar {
        let [a, b, c, _] = p_lower.0;
        let upper = Mono::spatial(c, b, a);
        &self.series.coeff(x, &upper) / &lower_factor(c, a)
    }
}

/// Residual of an eigenvalue equation and the position degrees it certifies.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenResidual {
    /// Residual restricted to position degrees ≤ order − 1.
    pub residual: BiSeries,
    /// Highest certified position degree, if any.
    pub certified: Option<u32>,
}

impl EigenResidual {
    pub fn vanishes(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Residual of the variant's eigenvalue equation for index A.
pub fn check_eigen(e: &QExponential, a: DIndex) -> QResult<EigenResidual> {
    let rule = e.rule();
    let full = rule.act(a, &e.series)?.sub(&rule.eigenvalue(a, &e.series)?);
    let certified = e.order.checked_sub(1);
    let residual = match certified {
        Some(d) => full.filter(|m, _| m.degree() <= d),
        None => full.same_shape(),
    };
    Ok(EigenResidual { residual, certified })
}

/// The normalized solution of an eigenvalue equation up to position degree n.
pub fn solve_eigen(rule: EigenRule, n: u32) -> QResult<BiSeries> {
    let (xs, ps) = rule.shape();
    let mut total = BiSeries::zero(xs, ps);
    total.add_term(Mono::ONE, Mono::ONE, QScalar::one());
    let mut prev = total.clone();
    for d in 1..=n {
        let cols = monomials_of_degree(d);
        let below = monomials_of_degree(d - 1);
        let row_of: BTreeMap<Mono, usize> = below.iter().enumerate().map(|(k, m)| (*m, k)).collect();
        let p_monos = monomials_of_degree(d);
        let p_of: BTreeMap<Mono, usize> = p_monos.iter().enumerate().map(|(k, m)| (*m, k)).collect();
        let nrows = 3 * below.len();
        let mut m: Vec<SparseRow> = vec![SparseRow::new(); nrows];
        let mut b: Vec<SparseRow> = vec![SparseRow::new(); nrows];
        for (ai, a) in DIndex::SPATIAL.iter().enumerate() {
            let kind = rule.kind(*a);
            for (ci, mono) in cols.iter().enumerate() {
                let img = partial_action(kind, &NSeries::monomial(*mono, QScalar::one(), Space::Position, xs.1))?;
                for (mm, c) in img.terms() {
                    m[ai * below.len() + row_of[mm]].insert(ci, c.clone());
                }
            }
            for ((xm, pm), c) in rule.eigenvalue(*a, &prev)?.terms() {
                b[ai * below.len() + row_of[xm]].insert(p_of[pm], c.clone());
            }
        }
        let sol = solve_exact(&m, cols.len(), &b)?;
        let mut layer = BiSeries::zero(xs, ps);
        for (ci, row) in sol.iter().enumerate() {
            for (pk, c) in row {
                layer.add_term(cols[ci], p_monos[*pk], c.clone());
            }
        }
        total = total.add(&layer);
        prev = layer;
    }
    Ok(total)
}
