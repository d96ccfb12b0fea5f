use super::gauss::{GInt, GRat};
use super::modular::gcd_with_cofactors;
use super::poly::ZPoly;
use crate::error::{QError, QResult};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Element of Q(i)(q), stored as `c * q^e * num(q) / den(q)`.
///
/// Canonical form: `num` and `den` are primitive over Z[i], coprime, with
/// nonzero constant terms and first-quadrant leading coefficients; `c`
/// carries the Gaussian-rational content. Zero is `c = 0, e = 0, num = den = 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QScalar {
    c: GRat,
    e: i64,
    num: ZPoly,
    den: ZPoly,
}

impl QScalar {
    pub fn zero() -> Self {
        QScalar { c: GRat::zero(), e: 0, num: ZPoly::one(), den: ZPoly::one() }
    }

    pub fn one() -> Self {
        QScalar::from_grat(GRat::one())
    }

    pub fn from_int(n: i64) -> Self {
        QScalar::from_grat(GRat::from_gint(&GInt::from_int(n)))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        QScalar::from_grat(GRat::new(BigRational::new(n.into(), d.into()), BigRational::zero()))
    }

    pub fn from_rational(r: BigRational) -> Self {
        QScalar::from_grat(GRat::new(r, BigRational::zero()))
    }

    pub fn from_grat(c: GRat) -> Self {
        if c.is_zero() {
            return QScalar::zero();
        }
        QScalar { c, e: 0, num: ZPoly::one(), den: ZPoly::one() }
    }

    pub fn i() -> Self {
        QScalar::from_grat(GRat::from_gint(&GInt::i()))
    }

    /// The formal parameter q.
    pub fn q() -> Self {
        QScalar::q_pow(1)
    }

    pub fn q_pow(k: i64) -> Self {
        QScalar { c: GRat::one(), e: k, num: ZPoly::one(), den: ZPoly::one() }
    }

    /// λ = q − q⁻¹.
    pub fn lambda() -> Self {
        QScalar::from_laurent(&[(1, 1), (-1, -1)])
    }

    /// λ₊ = q + q⁻¹.
    pub fn lambda_plus() -> Self {
        QScalar::from_laurent(&[(1, 1), (-1, 1)])
    }

    /// Σ coeff·q^exp over integer pairs (exp, coeff).
    pub fn from_laurent(terms: &[(i64, i64)]) -> Self {
        let mut acc = QScalar::zero();
        for &(e, c) in terms {
            acc = &acc + &(&QScalar::from_int(c) * &QScalar::q_pow(e));
        }
        acc
    }

    /// Laurent polynomial Σ coeffs[k] q^{lo + k} over Z[i].
    pub fn from_laurent_coeffs(lo: i64, coeffs: Vec<GInt>) -> Self {
        QScalar::build(GRat::one(), lo, ZPoly::from_coeffs(coeffs), ZPoly::one())
    }

    /// Canonicalize an arbitrary `c q^e num/den` with coprime num/den.
    fn build(c: GRat, e: i64, num: ZPoly, den: ZPoly) -> Self {
        if c.is_zero() || num.is_zero() {
            return QScalar::zero();
        }
        let mut c = c;
        let mut e = e;
        let mut num = num;
        let mut den = den;
        let k = num.low_order();
        if k > 0 {
            num = num.shift_down(k);
            e += k as i64;
        }
        let k = den.low_order();
        if k > 0 {
            den = den.shift_down(k);
            e -= k as i64;
        }
        let cn = num.content();
        if !cn.is_one() {
            num = num.div_scalar_exact(&cn);
            c = c.mul_gint(&cn);
        }
        let cd = den.content();
        if !cd.is_one() {
            den = den.div_scalar_exact(&cd);
            c = &c * &GRat::from_gint(&cd).inv();
        }
        let u = num.lc().canonical_unit();
        if u != 0 {
            num = num.mul_i_pow(u);
            c = c.mul_i_pow(4 - u);
        }
        let u = den.lc().canonical_unit();
        if u != 0 {
            den = den.mul_i_pow(u);
            c = c.mul_i_pow(u);
        }
        QScalar { c, e, num, den }
    }

    fn reduce_build(c: GRat, e: i64, num: ZPoly, den: ZPoly) -> Self {
        if c.is_zero() || num.is_zero() {
            return QScalar::zero();
        }
        let (num, den) = if den.deg() == 0 || num.deg() == 0 {
            (num, den)
        } else {
            let n = primitive(&num);
            let (_, qn, qd) = gcd_with_cofactors(&n.1, &den);
            (qn.scale(&n.0), qd)
        };
        QScalar::build(c, e, num, den)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.c.is_one() && self.e == 0 && self.num.is_one() && self.den.is_one()
    }

    /// True when the value is c·q^e·(Laurent polynomial).
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    pub fn q_exponent(&self) -> i64 {
        self.e
    }

    pub fn content(&self) -> &GRat {
        &self.c
    }

    pub fn numerator(&self) -> &ZPoly {
        &self.num
    }

    pub fn denominator(&self) -> &ZPoly {
        &self.den
    }

    /// (numerator, denominator) as Gaussian-rational coefficient lists in q,
    /// lowest degree first, with the denominator monic.
    pub fn monic_parts(&self) -> (Vec<GRat>, Vec<GRat>) {
        if self.is_zero() {
            return (vec![], vec![GRat::one()]);
        }
        let lcd = GRat::from_gint(self.den.lc()).inv();
        let scale = &self.c * &lcd;
        let shift_n = self.e.max(0) as usize;
        let shift_d = (-self.e).max(0) as usize;
        let n = self.num.shift_up(shift_n);
        let d = self.den.shift_up(shift_d);
        let nc = n.coeffs().iter().map(|z| &scale * &GRat::from_gint(z)).collect();
        let dc = d.coeffs().iter().map(|z| &lcd * &GRat::from_gint(z)).collect();
        (nc, dc)
    }

    pub fn inv(&self) -> QResult<Self> {
        if self.is_zero() {
            return Err(QError::DivisionByZero);
        }
        Ok(QScalar::build(self.c.inv(), -self.e, self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = QScalar::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    pub fn powi(&self, k: i64) -> QResult<Self> {
        if k >= 0 {
            Ok(self.pow(k as u32))
        } else {
            self.inv().map(|v| v.pow((-k) as u32))
        }
    }

    /// Complex conjugation with q real.
    pub fn conj(&self) -> Self {
        QScalar::build(self.c.conj(), self.e, self.num.conj(), self.den.conj())
    }

    /// Substitution q → q⁻¹.
    pub fn invert_q(&self) -> Self {
        if self.is_zero() {
            return QScalar::zero();
        }
        let e = -self.e - self.num.deg() as i64 + self.den.deg() as i64;
        QScalar::build(self.c.clone(), e, self.num.reverse(), self.den.reverse())
    }

    /// Multiply by q^k.
    pub fn mul_q_pow(&self, k: i64) -> Self {
        if self.is_zero() {
            return QScalar::zero();
        }
        QScalar { e: self.e + k, ..self.clone() }
    }

    pub fn mul_i_pow(&self, k: u32) -> Self {
        if self.is_zero() {
            return QScalar::zero();
        }
        QScalar { c: self.c.mul_i_pow(k), ..self.clone() }
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, q: &BigRational) -> QResult<GRat> {
        if self.is_zero() {
            return Ok(GRat::zero());
        }
        if q.is_zero() || q.is_negative() {
            return Err(QError::InvalidParameter(format!("q must be positive, got {q}")));
        }
        let d = self.den.eval(q);
        if d.is_zero() {
            return Err(QError::PoleAtQ(q.to_string()));
        }
        let n = self.num.eval(q);
        let qe = if self.e >= 0 {
            num_traits::pow(q.clone(), self.e as usize)
        } else {
            num_traits::pow(q.recip(), (-self.e) as usize)
        };
        let ratio = &n * &d.inv();
        let v = &(&self.c * &ratio) * &GRat::new(qe, BigRational::zero());
        Ok(v)
    }

    pub fn eval(&self, q: &BigRational) -> QResult<Complex64> {
        let v = self.eval_exact(q)?;
        Ok(Complex64::new(rat_to_f64(&v.re), rat_to_f64(&v.im)))
    }

    /// True when the value prints as a single signed term c·q^e with c real or imaginary.
    pub fn is_single_term(&self) -> bool {
        self.is_zero() || (self.num.is_one() && self.den.is_one() && (self.c.re.is_zero() || self.c.im.is_zero()))
    }

    /// Rough size measure used for pivot selection.
    pub fn weight(&self) -> usize {
        self.num.deg() + self.den.deg() + (self.num.max_bits() + self.den.max_bits()) as usize
    }

    /// Exact rational number if the value is q-independent and real.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.e == 0 && self.num.is_one() && self.den.is_one() && self.c.im.is_zero() {
            Some(self.c.re.clone())
        } else {
            None
        }
    }

    pub fn as_grat(&self) -> Option<GRat> {
        if self.is_zero() {
            return Some(GRat::zero());
        }
        if self.e == 0 && self.num.is_one() && self.den.is_one() {
            Some(self.c.clone())
        } else {
            None
        }
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n = r.numer().bits() as i64;
    let d = r.denom().bits() as i64;
    let shift = n - d - 60;
    let scaled = if shift > 0 {
        BigRational::new(r.numer().clone(), r.denom() << shift as usize)
    } else {
        BigRational::new(r.numer() << (-shift) as usize, r.denom().clone())
    };
    scaled.to_integer().to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

fn primitive(p: &ZPoly) -> (GInt, ZPoly) {
    let c = p.content();
    (c.clone(), p.div_scalar_exact(&c))
}

impl Default for QScalar {
    fn default() -> Self {
        QScalar::zero()
    }
}

impl From<i64> for QScalar {
    fn from(n: i64) -> Self {
        QScalar::from_int(n)
    }
}

impl<'a> Mul<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn mul(self, o: &QScalar) -> QScalar {
        if self.is_zero() || o.is_zero() {
            return QScalar::zero();
        }
        let c = &self.c * &o.c;
        let e = self.e + o.e;
        if self.den.is_one() && o.den.is_one() {
            return QScalar::build(c, e, self.num.mul(&o.num), ZPoly::one());
        }
        let (_, n1, d2) = gcd_with_cofactors(&self.num, &o.den);
        let (_, n2, d1) = gcd_with_cofactors(&o.num, &self.den);
        QScalar::build(c, e, n1.mul(&n2), d1.mul(&d2))
    }
}

impl<'a> Add<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn add(self, o: &QScalar) -> QScalar {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.e.min(o.e);
        let (ra, ma) = self.c.split();
        let (rb, mb) = o.c.split();
        let m = num_integer::lcm(ma.clone(), mb.clone());
        let ra = ra.scale(&(&m / &ma));
        let rb = rb.scale(&(&m / &mb));
        let na = self.num.shift_up((self.e - e) as usize).scale(&ra);
        let nb = o.num.shift_up((o.e - e) as usize).scale(&rb);
        let inv_m = GRat::new(BigRational::new(BigInt::one(), m), BigRational::zero());
        if self.den == o.den {
            let n = na.add(&nb);
            return QScalar::reduce_build(inv_m, e, n, self.den.clone());
        }
        let (g, da, db) = gcd_with_cofactors(&self.den, &o.den);
        let n = na.mul(&db).add(&nb.mul(&da));
        if n.is_zero() {
            return QScalar::zero();
        }
        let k = n.low_order();
        let n = n.shift_down(k);
        let (cn, n) = primitive(&n);
        let (_, n, g) = gcd_with_cofactors(&n, &g);
        let d = g.mul(&da).mul(&db);
        QScalar::build(inv_m.mul_gint(&cn), e + k as i64, n, d)
    }
}

impl<'a> Sub<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn sub(self, o: &QScalar) -> QScalar {
        self + &(-o)
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        if self.is_zero() {
            return QScalar::zero();
        }
        QScalar { c: -&self.c, ..self.clone() }
    }
}

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        -&self
    }
}

impl<'a> Div<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn div(self, o: &QScalar) -> QScalar {
        self * &o.inv().expect("division by zero QScalar")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QScalar> for QScalar {
            type Output = QScalar;
            fn $m(self, o: QScalar) -> QScalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a QScalar> for QScalar {
            type Output = QScalar;
            fn $m(self, o: &QScalar) -> QScalar {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl std::iter::Sum for QScalar {
    fn sum<I: Iterator<Item = QScalar>>(iter: I) -> QScalar {
        iter.fold(QScalar::zero(), |a, b| &a + &b)
    }
}

impl std::iter::Product for QScalar {
    fn product<I: Iterator<Item = QScalar>>(iter: I) -> QScalar {
        iter.fold(QScalar::one(), |a, b| &a * &b)
    }
}

fn write_poly(f: &mut fmt::Formatter<'_>, p: &[GRat], lo: i64) -> fmt::Result {
    let mut first = true;
    for (k, a) in p.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let ex = lo + k as i64;
        let (neg, body) = signed_body(a);
        let sign = if neg { "-" } else { "+" };
        if first {
            if sign == "-" {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{sign}")?;
        }
        first = false;
        let qpart = match ex {
            0 => String::new(),
            1 => "q".to_string(),
            _ => format!("q^{ex}"),
        };
        if qpart.is_empty() {
            write!(f, "{body}")?;
        } else if body == "1" {
            write!(f, "{qpart}")?;
        } else {
            write!(f, "{body}*{qpart}")?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// Sign and magnitude text of a Gaussian rational.
pub(crate) fn signed_body(a: &GRat) -> (bool, String) {
    if a.im.is_zero() {
        (a.re.is_negative(), a.re.abs().to_string())
    } else if a.re.is_zero() {
        let m = a.im.abs();
        let body = if m.is_one() { "i".to_string() } else { format!("{m}*i") };
        (a.im.is_negative(), body)
    } else {
        (false, a.to_string())
    }
}

fn count_terms(p: &[GRat]) -> usize {
    p.iter().filter(|a| !a.is_zero()).count()
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Laurent numerator over Laurent denominator, content folded into the numerator.
        let lcd = GRat::from_gint(self.den.lc()).inv();
        let scale = &self.c * &lcd;
        let n: Vec<GRat> = self.num.coeffs().iter().map(|z| &scale * &GRat::from_gint(z)).collect();
        let d: Vec<GRat> = self.den.coeffs().iter().map(|z| &lcd * &GRat::from_gint(z)).collect();
        let dn = self.den.is_one();
        if dn {
            return write_poly(f, &n, self.e);
        }
        let nt = count_terms(&n);
        if nt > 1 {
            write!(f, "(")?;
        }
        write_poly(f, &n, self.e)?;
        if nt > 1 {
            write!(f, ")")?;
        }
        write!(f, "/")?;
        if count_terms(&d) > 1 {
            write!(f, "(")?;
            write_poly(f, &d, 0)?;
            write!(f, ")")
        } else {
            write_poly(f, &d, 0)
        }
    }
}
