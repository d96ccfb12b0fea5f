use crate::qcoeff::QScalar;
use std::cmp::Ordering as CmpOrdering;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    Position,
    Momentum,
}

/// Which generator order a commutative monomial stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ordering {
    /// (X⁺)^a (X³)^b (X⁻)^c (X⁰)^d
    Standard,
    /// (X⁰)^d (X⁻)^c (X³)^b (X⁺)^a
    Reversed,
}

impl Ordering {
    pub fn flip(self) -> Ordering {
        match self {
            Ordering::Standard => Ordering::Reversed,
            Ordering::Reversed => Ordering::Standard,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Ordering::Standard => "standard",
            Ordering::Reversed => "reversed",
        }
    }
}

/// Exponents (n₊, n₃, n₋, n₀).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Mono(pub [u32; 4]);

impl Mono {
    pub const ONE: Mono = Mono([0; 4]);

    pub fn new(p: u32, t: u32, m: u32, z: u32) -> Mono {
        Mono([p, t, m, z])
    }

    pub fn spatial(p: u32, t: u32, m: u32) -> Mono {
        Mono([p, t, m, 0])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn spatial_degree(&self) -> u32 {
        self.0[0] + self.0[1] + self.0[2]
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        Mono([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2], self.0[3] + o.0[3]])
    }

    /// Exchange the + and − exponents.
    pub fn swap(&self) -> Mono {
        Mono([self.0[2], self.0[1], self.0[0], self.0[3]])
    }

    pub fn get(&self, k: usize) -> u32 {
        self.0[k]
    }

    pub fn with(&self, k: usize, v: u32) -> Mono {
        let mut e = self.0;
        e[k] = v;
        Mono(e)
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<CmpOrdering> {
        Some(self.cmp(o))
    }
}

impl Ord for Mono {
    /// Graded, then reverse-lexicographic so x⁺ leads within a degree.
    fn cmp(&self, o: &Self) -> CmpOrdering {
        self.degree().cmp(&o.degree()).then_with(|| o.0.cmp(&self.0))
    }
}

/// Sparse normal-ordered series with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NSeries {
    terms: BTreeMap<Mono, QScalar>,
    pub space: Space,
    pub ordering: Ordering,
}

impl NSeries {
    pub fn zero(space: Space, ordering: Ordering) -> Self {
        NSeries { terms: BTreeMap::new(), space, ordering }
    }

    pub fn constant(c: QScalar, space: Space, ordering: Ordering) -> Self {
        NSeries::monomial(Mono::ONE, c, space, ordering)
    }

    pub fn one(space: Space, ordering: Ordering) -> Self {
        NSeries::constant(QScalar::one(), space, ordering)
    }

    pub fn monomial(m: Mono, c: QScalar, space: Space, ordering: Ordering) -> Self {
        let mut s = NSeries::zero(space, ordering);
        s.add_term(m, c);
        s
    }

    /// Position series in standard order.
    pub fn pos() -> Self {
        NSeries::zero(Space::Position, Ordering::Standard)
    }

    /// Single coordinate x⁺, x³, x⁻ (k = 0, 1, 2) or t (k = 3).
    pub fn var(k: usize, space: Space, ordering: Ordering) -> Self {
        let mut e = [0u32; 4];
        e[k] = 1;
        NSeries::monomial(Mono(e), QScalar::one(), space, ordering)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Mono, QScalar)>, space: Space, ordering: Ordering) -> Self {
        let mut s = NSeries::zero(space, ordering);
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    pub fn same_shape(&self) -> Self {
        NSeries::zero(self.space, self.ordering)
    }

    pub fn add_term(&mut self, m: Mono, c: QScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = &*v + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &QScalar)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Mono, QScalar> {
        self.terms
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

    pub fn coeff(&self, m: &Mono) -> QScalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn spatial_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.spatial_degree()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &NSeries) -> NSeries {
        let mut s = self.clone();
        for (m, c) in &o.terms {
            s.add_term(*m, c.clone());
        }
        s
    }

    pub fn sub(&self, o: &NSeries) -> NSeries {
        let mut s = self.clone();
        for (m, c) in &o.terms {
            s.add_term(*m, -c);
        }
        s
    }

    pub fn neg(&self) -> NSeries {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, k: &QScalar) -> NSeries {
        if k.is_zero() {
            return self.same_shape();
        }
        self.map_coeffs(|c| c * k)
    }

    pub fn map_coeffs(&self, f: impl Fn(&QScalar) -> QScalar) -> NSeries {
        let mut s = self.same_shape();
        for (m, c) in &self.terms {
            s.add_term(*m, f(c));
        }
        s
    }

    /// Apply a per-monomial map returning (new monomial, factor).
    pub fn map_terms(&self, f: impl Fn(&Mono, &QScalar) -> Option<(Mono, QScalar)>) -> NSeries {
        let mut s = self.same_shape();
        for (m, c) in &self.terms {
            if let Some((m2, c2)) = f(m, c) {
                s.add_term(m2, c2);
            }
        }
        s
    }

    /// Commutative product (exponents add); the algebra product lives in `star`.
    pub fn commutative_mul(&self, o: &NSeries) -> NSeries {
        let mut s = self.same_shape();
        for (m, c) in &self.terms {
            for (m2, c2) in &o.terms {
                s.add_term(m.mul(m2), c * c2);
            }
        }
        s
    }

    pub fn truncate(&self, max_degree: u32) -> NSeries {
        self.map_terms(|m, c| (m.degree() <= max_degree).then(|| (*m, c.clone())))
    }

    pub fn homogeneous_part(&self, degree: u32) -> NSeries {
        self.map_terms(|m, c| (m.degree() == degree).then(|| (*m, c.clone())))
    }

    pub fn with_ordering(mut self, ordering: Ordering) -> NSeries {
        self.ordering = ordering;
        self
    }

    pub fn with_space(mut self, space: Space) -> NSeries {
        self.space = space;
        self
    }

    /// Quantum-space conjugation: a x⁺^a x³^b x⁻^c t^d ↦ ā (−q)^{a−c} x⁺^c x³^b x⁻^a t^d.
    /// The same formula holds in either generator order.
    pub fn conjugate(&self) -> NSeries {
        self.map_terms(|m, c| {
            let e = m.0[0] as i64 - m.0[2] as i64;
            let mut f = c.conj().mul_q_pow(e);
            if e.rem_euclid(2) == 1 {
                f = -f;
            }
            Some((m.swap(), f))
        })
    }

    /// q → q⁻¹ on coefficients with x⁺ ↔ x⁻; carries standard to reversed order.
    pub fn theta(&self) -> NSeries {
        let mut s = NSeries::zero(self.space, self.ordering.flip());
        for (m, c) in &self.terms {
            s.add_term(m.swap(), c.invert_q());
        }
        s
    }

    /// Multiply every monomial by its exponent on axis k.
    pub fn number_operator(&self, k: usize) -> NSeries {
        self.map_terms(|m, c| Some((*m, c * &QScalar::from_int(m.0[k] as i64))))
    }

    /// q^{c·n̂_k}: multiply each monomial by q^{c·n_k}.
    pub fn scale_operator(&self, k: usize, c: i64) -> NSeries {
        self.map_terms(|m, v| Some((*m, v.mul_q_pow(c * m.0[k] as i64))))
    }

    /// Keep terms satisfying a predicate.
    pub fn filter(&self, f: impl Fn(&Mono) -> bool) -> NSeries {
        self.map_terms(|m, c| f(m).then(|| (*m, c.clone())))
    }
}

/// Variable labels used for printing and parsing.
pub fn var_names(space: Space) -> [&'static str; 4] {
    match space {
        Space::Position => ["x+", "x3", "x-", "t"],
        Space::Momentum => ["p+", "p3", "p-", "t"],
    }
}

pub fn mono_text(m: &Mono, names: &[&str; 4]) -> String {
    let mut parts = Vec::new();
    for k in 0..4 {
        match m.0[k] {
            0 => {}
            1 => parts.push(names[k].to_string()),
            e => parts.push(format!("{}^{}", names[k], e)),
        }
    }
    parts.join(" ")
}

/// Term text `coeff * monomial`; returns (negative, magnitude text).
pub fn term_text(m: &Mono, c: &QScalar, names: &[&str; 4]) -> (bool, String) {
    let mono = mono_text(m, names);
    let single = c.is_single_term();
    let text = c.to_string();
    let (neg, mag) = if single && text.starts_with('-') { (true, text[1..].to_string()) } else { (false, text) };
    let body = if mono.is_empty() {
        if single {
            mag
        } else {
            format!("({mag})")
        }
    } else if mag == "1" {
        mono
    } else if single {
        format!("{mag} * {mono}")
    } else {
        format!("({mag}) * {mono}")
    };
    (neg, body)
}

impl fmt::Display for NSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = var_names(self.space);
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let (neg, body) = term_text(m, c, &names);
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
