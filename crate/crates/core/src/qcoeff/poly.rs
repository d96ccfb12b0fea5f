use super::gauss::{GInt, GRat};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// Dense polynomial in q over the Gaussian integers, lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ZPoly {
    c: Vec<GInt>,
}

impl ZPoly {
    pub fn from_coeffs(mut c: Vec<GInt>) -> Self {
        while c.last().is_some_and(|z| z.is_zero()) {
            c.pop();
        }
        ZPoly { c }
    }

    pub fn zero() -> Self {
        ZPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        ZPoly { c: vec![GInt::one()] }
    }

    pub fn constant(z: GInt) -> Self {
        ZPoly::from_coeffs(vec![z])
    }

    pub fn coeffs(&self) -> &[GInt] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lc(&self) -> &GInt {
        self.c.last().expect("leading coefficient of zero polynomial")
    }

    pub fn is_real(&self) -> bool {
        self.c.iter().all(|z| z.im.is_zero())
    }

    /// Index of the lowest nonzero coefficient.
    pub fn low_order(&self) -> usize {
        self.c.iter().position(|z| !z.is_zero()).unwrap_or(0)
    }

    pub fn shift_down(&self, k: usize) -> Self {
        ZPoly { c: self.c[k..].to_vec() }
    }

    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut c = vec![GInt::zero(); k];
        c.extend(self.c.iter().cloned());
        ZPoly { c }
    }

    pub fn add(&self, o: &ZPoly) -> ZPoly {
        let n = self.c.len().max(o.c.len());
        let mut c = Vec::with_capacity(n);
        for k in 0..n {
            match (self.c.get(k), o.c.get(k)) {
                (Some(a), Some(b)) => c.push(a + b),
                (Some(a), None) => c.push(a.clone()),
                (None, Some(b)) => c.push(b.clone()),
                (None, None) => unreachable!(),
            }
        }
        ZPoly::from_coeffs(c)
    }

    pub fn neg(&self) -> ZPoly {
        ZPoly { c: self.c.iter().map(|z| -z).collect() }
    }

    pub fn sub(&self, o: &ZPoly) -> ZPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &ZPoly) -> ZPoly {
        if self.is_zero() || o.is_zero() {
            return ZPoly::zero();
        }
        if self.c.len() == 1 {
            return o.scale(&self.c[0]);
        }
        if o.c.len() == 1 {
            return self.scale(&o.c[0]);
        }
        let real = self.is_real() && o.is_real();
        if real {
            let mut c = vec![BigInt::zero(); self.c.len() + o.c.len() - 1];
            for (i, a) in self.c.iter().enumerate() {
                if a.re.is_zero() {
                    continue;
                }
                for (j, b) in o.c.iter().enumerate() {
                    if !b.re.is_zero() {
                        c[i + j] += &a.re * &b.re;
                    }
                }
            }
            return ZPoly::from_coeffs(c.into_iter().map(GInt::from_int).collect());
        }
        let mut c = vec![GInt::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    let t = a * b;
                    c[i + j].re += t.re;
                    c[i + j].im += t.im;
                }
            }
        }
        ZPoly::from_coeffs(c)
    }

    pub fn scale(&self, z: &GInt) -> ZPoly {
        if z.is_one() {
            return self.clone();
        }
        ZPoly::from_coeffs(self.c.iter().map(|a| a * z).collect())
    }

    pub fn mul_i_pow(&self, k: u32) -> ZPoly {
        ZPoly { c: self.c.iter().map(|a| a.mul_i_pow(k)).collect() }
    }

    pub fn conj(&self) -> ZPoly {
        ZPoly { c: self.c.iter().map(|a| a.conj()).collect() }
    }

    pub fn reverse(&self) -> ZPoly {
        let mut c = self.c.clone();
        c.reverse();
        ZPoly::from_coeffs(c)
    }

    /// Gaussian-integer gcd of all coefficients, in canonical form.
    pub fn content(&self) -> GInt {
        let mut g = GInt::zero();
        for a in &self.c {
            g = g.gcd(a);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn div_scalar_exact(&self, z: &GInt) -> ZPoly {
        if z.is_one() {
            return self.clone();
        }
        ZPoly {
            c: self.c.iter().map(|a| a.div_exact(z).expect("content divides coefficients")).collect(),
        }
    }

    /// Exact quotient over Z[i], or None if `d` does not divide `self`.
    pub fn div_exact(&self, d: &ZPoly) -> Option<ZPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(ZPoly::zero());
        }
        if d.c.len() == 1 {
            let mut out = Vec::with_capacity(self.c.len());
            for a in &self.c {
                out.push(a.div_exact(&d.c[0])?);
            }
            return Some(ZPoly { c: out });
        }
        if self.c.len() < d.c.len() {
            return None;
        }
        let mut r = self.c.clone();
        let dl = d.c.len();
        let lc = d.lc();
        let mut quo = vec![GInt::zero(); r.len() - dl + 1];
        for k in (0..quo.len()).rev() {
            let top = &r[k + dl - 1];
            if top.is_zero() {
                continue;
            }
            let t = top.div_exact(lc)?;
            for (j, b) in d.c.iter().enumerate() {
                if !b.is_zero() {
                    let s = &t * b;
                    r[k + j] = &r[k + j] - &s;
                }
            }
            quo[k] = t;
        }
        if r.iter().any(|z| !z.is_zero()) {
            return None;
        }
        Some(ZPoly::from_coeffs(quo))
    }

    /// Horner evaluation at a rational point.
    pub fn eval(&self, x: &BigRational) -> GRat {
        let mut re = BigRational::zero();
        let mut im = BigRational::zero();
        for a in self.c.iter().rev() {
            re = &re * x + BigRational::from_integer(a.re.clone());
            im = &im * x + BigRational::from_integer(a.im.clone());
        }
        GRat::new(re, im)
    }

    /// Horner evaluation at an integer point.
    pub fn eval_int(&self, x: &BigInt) -> GInt {
        let mut acc = GInt::zero();
        for a in self.c.iter().rev() {
            acc = GInt { re: &acc.re * x + &a.re, im: &acc.im * x + &a.im };
        }
        acc
    }

    pub fn max_bits(&self) -> u64 {
        self.c.iter().map(|z| z.re.bits().max(z.im.bits())).max().unwrap_or(0)
    }
}

impl Default for ZPoly {
    fn default() -> Self {
        ZPoly::one()
    }
}

#[cfg(test)]
pub(crate) fn int_poly(v: &[i64]) -> ZPoly {
    ZPoly::from_coeffs(v.iter().map(|&a| GInt::from_int(a)).collect())
}
