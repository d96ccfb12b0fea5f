//! Series in two independent sets of variables (x ⊗ p or x ⊗ y).

use crate::algebra::{var_names, Mono, NSeries, Ordering, Space};
use crate::error::QResult;
use crate::qcoeff::QScalar;
use std::collections::BTreeMap;
use std::fmt;

/// Space and ordering of one tensor factor.
pub type Shape = (Space, Ordering);

#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries {
    terms: BTreeMap<(Mono, Mono), QScalar>,
    pub first: Shape,
    pub second: Shape,
}

impl BiSeries {
    pub fn zero(first: Shape, second: Shape) -> Self {
        BiSeries { terms: BTreeMap::new(), first, second }
    }

    pub fn same_shape(&self) -> Self {
        BiSeries::zero(self.first, self.second)
    }

    /// f ⊗ g
    pub fn tensor(f: &NSeries, g: &NSeries) -> Self {
        let mut out = BiSeries::zero((f.space, f.ordering), (g.space, g.ordering));
        for (m, c) in f.terms() {
            for (n, d) in g.terms() {
                out.add_term(*m, *n, c * d);
            }
        }
        out
    }

    pub fn add_term(&mut self, m: Mono, n: Mono, c: QScalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((m, n)).or_insert_with(QScalar::zero);
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&(m, n));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Mono, Mono), &QScalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Mono, n: &Mono) -> QScalar {
        self.terms.get(&(*m, *n)).cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &BiSeries) -> BiSeries {
        let mut s = self.clone();
        for ((m, n), c) in &o.terms {
            s.add_term(*m, *n, c.clone());
        }
        s
    }

    pub fn sub(&self, o: &BiSeries) -> BiSeries {
        let mut s = self.clone();
        for ((m, n), c) in &o.terms {
            s.add_term(*m, *n, -c);
        }
        s
    }

    pub fn scale(&self, k: &QScalar) -> BiSeries {
        let mut s = self.same_shape();
        for ((m, n), c) in &self.terms {
            s.add_term(*m, *n, c * k);
        }
        s
    }

    /// Keep terms whose monomial pair satisfies a predicate.
    pub fn filter(&self, f: impl Fn(&Mono, &Mono) -> bool) -> BiSeries {
        let mut s = self.same_shape();
        for ((m, n), c) in &self.terms {
            if f(m, n) {
                s.add_term(*m, *n, c.clone());
            }
        }
        s
    }

    /// Group by the second factor: second monomial ↦ series in the first variables.
    pub fn columns(&self) -> BTreeMap<Mono, NSeries> {
        let mut out: BTreeMap<Mono, NSeries> = BTreeMap::new();
        for ((m, n), c) in &self.terms {
            out.entry(*n)
                .or_insert_with(|| NSeries::zero(self.first.0, self.first.1))
                .add_term(*m, c.clone());
        }
        out
    }

    /// Group by the first factor: first monomial ↦ series in the second variables.
    pub fn rows(&self) -> BTreeMap<Mono, NSeries> {
        let mut out: BTreeMap<Mono, NSeries> = BTreeMap::new();
        for ((m, n), c) in &self.terms {
            out.entry(*m)
                .or_insert_with(|| NSeries::zero(self.second.0, self.second.1))
                .add_term(*n, c.clone());
        }
        out
    }

    /// Apply a linear map to the first factor.
    pub fn map_first(&self, first: Shape, f: impl Fn(&NSeries) -> QResult<NSeries>) -> QResult<BiSeries> {
        let mut out = BiSeries::zero(first, self.second);
        for (n, col) in self.columns() {
            for (m, c) in f(&col)?.terms() {
                out.add_term(*m, n, c.clone());
            }
        }
        Ok(out)
    }

    /// Apply a linear map to the second factor.
    pub fn map_second(&self, second: Shape, f: impl Fn(&NSeries) -> QResult<NSeries>) -> QResult<BiSeries> {
        let mut out = BiSeries::zero(self.first, second);
        for (m, row) in self.rows() {
            for (n, c) in f(&row)?.terms() {
                out.add_term(m, *n, c.clone());
            }
        }
        Ok(out)
    }

    /// Set the first variables to zero.
    pub fn first_at_zero(&self) -> NSeries {
        let mut s = NSeries::zero(self.second.0, self.second.1);
        for ((m, n), c) in &self.terms {
            if *m == Mono::ONE {
                s.add_term(*n, c.clone());
            }
        }
        s
    }

    /// Set the second variables to zero.
    pub fn second_at_zero(&self) -> NSeries {
        let mut s = NSeries::zero(self.first.0, self.first.1);
        for ((m, n), c) in &self.terms {
            if *n == Mono::ONE {
                s.add_term(*m, c.clone());
            }
        }
        s
    }

    /// q → q⁻¹ with + ↔ − in both factors; flips both orderings.
    pub fn theta(&self) -> BiSeries {
        let mut s = BiSeries::zero((self.first.0, self.first.1.flip()), (self.second.0, self.second.1.flip()));
        for ((m, n), c) in &self.terms {
            s.add_term(m.swap(), n.swap(), c.invert_q());
        }
        s
    }

    pub fn first_degree(&self) -> u32 {
        self.terms.keys().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn second_degree(&self) -> u32 {
        self.terms.keys().map(|(_, n)| n.degree()).max().unwrap_or(0)
    }
}

fn second_names(first: Space, second: Space) -> [&'static str; 4] {
    if first == second {
        ["y+", "y3", "y-", "s"]
    } else {
        var_names(second)
    }
}

impl fmt::Display for BiSeries {
    /// Position factors are printed left of momentum factors.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let a = var_names(self.first.0);
        let b = second_names(self.first.0, self.second.0);
        for (k, ((m, n), c)) in self.terms.iter().enumerate() {
            let mono = [crate::algebra::mono_text(m, &a), crate::algebra::mono_text(n, &b)]
                .into_iter()
                .filter(|s| !s.is_empty())
                .collect::<Vec<_>>()
                .join(" ");
            let (neg, coef) = crate::algebra::term_text(&Mono::ONE, c, &a);
            let body = match (mono.is_empty(), coef.as_str()) {
                (true, _) => coef,
                (false, "1") => mono,
                (false, _) => format!("{coef} * {mono}"),
            };
            match (k, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// All spatial monomials of a given total degree, in a fixed order.
pub fn monomials_of_degree(d: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    for a in (0..=d).rev() {
        for b in (0..=d - a).rev() {
            out.push(Mono::spatial(a, b, d - a - b));
        }
    }
    out
}
