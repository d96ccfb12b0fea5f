//! Brute-force normal ordering of noncommutative words by the defining relations.

use super::series::{Mono, NSeries, Ordering, Space};
use crate::qcoeff::QScalar;
use std::collections::BTreeMap;

/// Generators X⁺, X³, X⁻ and the central X⁰.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    Plus,
    Three,
    Minus,
    Zero,
}

impl Gen {
    fn slot(self) -> usize {
        match self {
            Gen::Plus => 0,
            Gen::Three => 1,
            Gen::Minus => 2,
            Gen::Zero => 3,
        }
    }

    fn rank(self, ordering: Ordering) -> u8 {
        match ordering {
            Ordering::Standard => self.slot() as u8,
            Ordering::Reversed => match self {
                Gen::Zero => 0,
                Gen::Minus => 1,
                Gen::Three => 2,
                Gen::Plus => 3,
            },
        }
    }
}

/// A word in the generators with a scalar prefactor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NCWord {
    pub prefactor: QScalar,
    pub letters: Vec<Gen>,
}

impl NCWord {
    pub fn new(letters: Vec<Gen>) -> Self {
        NCWord { prefactor: QScalar::one(), letters }
    }

    pub fn concat(&self, o: &NCWord) -> NCWord {
        let mut letters = self.letters.clone();
        letters.extend(o.letters.iter().copied());
        NCWord { prefactor: &self.prefactor * &o.prefactor, letters }
    }

    /// The ordered word representing a monomial in the given ordering.
    pub fn from_mono(m: &Mono, ordering: Ordering) -> NCWord {
        let mut letters = Vec::new();
        let push = |g: Gen, n: u32, v: &mut Vec<Gen>| v.extend(std::iter::repeat(g).take(n as usize));
        match ordering {
            Ordering::Standard => {
                push(Gen::Plus, m.0[0], &mut letters);
                push(Gen::Three, m.0[1], &mut letters);
                push(Gen::Minus, m.0[2], &mut letters);
                push(Gen::Zero, m.0[3], &mut letters);
            }
            Ordering::Reversed => {
                push(Gen::Zero, m.0[3], &mut letters);
                push(Gen::Minus, m.0[2], &mut letters);
                push(Gen::Three, m.0[1], &mut letters);
                push(Gen::Plus, m.0[0], &mut letters);
            }
        }
        NCWord::new(letters)
    }
}

/// Rewrite an out-of-order adjacent pair (a, b) into ordered words.
fn rewrite_pair(a: Gen, b: Gen, ordering: Ordering) -> Vec<(QScalar, Vec<Gen>)> {
    use Gen::*;
    match (ordering, a, b) {
        (_, Zero, y) | (_, y, Zero) => {
            let _ = y;
            vec![(QScalar::one(), vec![b, a])]
        }
        (Ordering::Standard, Three, Plus) => vec![(QScalar::q_pow(2), vec![Plus, Three])],
        (Ordering::Standard, Minus, Three) => vec![(QScalar::q_pow(2), vec![Three, Minus])],
        (Ordering::Standard, Minus, Plus) => {
            vec![(QScalar::one(), vec![Plus, Minus]), (QScalar::lambda(), vec![Three, Three])]
        }
        (Ordering::Reversed, Plus, Three) => vec![(QScalar::q_pow(-2), vec![Three, Plus])],
        (Ordering::Reversed, Three, Minus) => vec![(QScalar::q_pow(-2), vec![Minus, Three])],
        (Ordering::Reversed, Plus, Minus) => {
            vec![(QScalar::one(), vec![Minus, Plus]), (-QScalar::lambda(), vec![Three, Three])]
        }
        _ => unreachable!("pair {a:?} {b:?} is already ordered"),
    }
}

fn mono_of(letters: &[Gen]) -> Mono {
    let mut e = [0u32; 4];
    for g in letters {
        e[g.slot()] += 1;
    }
    Mono(e)
}

/// Normal-order a word into the requested ordering by repeated rewriting.
pub fn normal_order_to(w: &NCWord, ordering: Ordering, space: Space) -> NSeries {
    let mut out = NSeries::zero(space, ordering);
    let mut work: BTreeMap<Vec<Gen>, QScalar> = BTreeMap::new();
    work.insert(w.letters.clone(), w.prefactor.clone());
    // Longest words first; rewriting never lengthens a word, so merging is effective.
    while let Some((word, c)) = work.pop_last() {
        if c.is_zero() {
            continue;
        }
        let pos = word.windows(2).position(|p| p[0].rank(ordering) > p[1].rank(ordering));
        match pos {
            None => out.add_term(mono_of(&word), c),
            Some(k) => {
                for (f, repl) in rewrite_pair(word[k], word[k + 1], ordering) {
                    let mut nw = word[..k].to_vec();
                    nw.extend(repl);
                    nw.extend_from_slice(&word[k + 2..]);
                    let v = &c * &f;
                    let slot = work.entry(nw).or_insert_with(QScalar::zero);
                    *slot = &*slot + &v;
                }
            }
        }
    }
    out
}

/// Standard-ordered image of a word.
pub fn normal_order_oracle(w: &NCWord) -> NSeries {
    normal_order_to(w, Ordering::Standard, Space::Position)
}

/// Re-express a series in the other generator ordering.
pub fn convert_ordering(f: &NSeries, target: Ordering) -> NSeries {
    if f.ordering == target {
        return f.clone();
    }
    let mut out = NSeries::zero(f.space, target);
    for (m, c) in f.terms() {
        let w = NCWord::from_mono(m, f.ordering);
        let img = normal_order_to(&w, target, f.space);
        for (m2, c2) in img.terms() {
            out.add_term(*m2, c * c2);
        }
    }
    out
}
