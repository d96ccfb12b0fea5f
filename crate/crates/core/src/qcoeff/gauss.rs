use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Gaussian integer a + b i.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GInt { re: re.into(), im: im.into() }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        GInt { re: n.into(), im: BigInt::zero() }
    }

    pub fn zero() -> Self {
        GInt::default()
    }

    pub fn one() -> Self {
        GInt::from_int(1)
    }

    pub fn i() -> Self {
        GInt::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        GInt { re: self.re.clone(), im: -&self.im }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        GInt { re: &self.re * k, im: &self.im * k }
    }

    /// Multiply by i^k.
    pub fn mul_i_pow(&self, k: u32) -> Self {
        match k % 4 {
            0 => self.clone(),
            1 => GInt { re: -&self.im, im: self.re.clone() },
            2 => GInt { re: -&self.re, im: -&self.im },
            _ => GInt { re: self.im.clone(), im: -&self.re },
        }
    }

    /// Exponent k with i^k * self in the first quadrant (re > 0, im >= 0).
    pub fn canonical_unit(&self) -> u32 {
        debug_assert!(!self.is_zero());
        for k in 0..4 {
            let z = self.mul_i_pow(k);
            if z.re.is_positive() && !z.im.is_negative() {
                return k;
            }
        }
        unreachable!("nonzero Gaussian integer has a first-quadrant associate")
    }

    pub fn canonical(&self) -> Self {
        if self.is_zero() {
            return GInt::zero();
        }
        self.mul_i_pow(self.canonical_unit())
    }

    /// Exact quotient, or None when `d` does not divide `self`.
    pub fn div_exact(&self, d: &GInt) -> Option<GInt> {
        if d.im.is_zero() {
            let (qr, rr) = self.re.div_rem(&d.re);
            let (qi, ri) = self.im.div_rem(&d.re);
            return if rr.is_zero() && ri.is_zero() { Some(GInt { re: qr, im: qi }) } else { None };
        }
        let n = d.norm();
        let t = self * &d.conj();
        let (qr, rr) = t.re.div_rem(&n);
        let (qi, ri) = t.im.div_rem(&n);
        if rr.is_zero() && ri.is_zero() {
            Some(GInt { re: qr, im: qi })
        } else {
            None
        }
    }

    /// Euclidean division with rounded quotient.
    pub fn div_round(&self, d: &GInt) -> GInt {
        let n = d.norm();
        let t = self * &d.conj();
        GInt { re: round_div(&t.re, &n), im: round_div(&t.im, &n) }
    }

    pub fn gcd(&self, other: &GInt) -> GInt {
        if self.im.is_zero() && other.im.is_zero() {
            return GInt::from_int(self.re.gcd(&other.re)).canonical();
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let q = a.div_round(&b);
            let r = &a - &(&q * &b);
            a = b;
            b = r;
        }
        a.canonical()
    }
}

fn round_div(a: &BigInt, n: &BigInt) -> BigInt {
    // floor((2a + n) / 2n)
    let two = BigInt::from(2);
    (a * &two + n).div_floor(&(n * &two))
}

impl From<i64> for GInt {
    fn from(v: i64) -> Self {
        GInt::from_int(v)
    }
}

impl<'a> Add<&'a GInt> for &'a GInt {
    type Output = GInt;
    fn add(self, o: &GInt) -> GInt {
        GInt { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a GInt> for &'a GInt {
    type Output = GInt;
    fn sub(self, o: &GInt) -> GInt {
        GInt { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a GInt> for &'a GInt {
    type Output = GInt;
    fn mul(self, o: &GInt) -> GInt {
        if self.im.is_zero() && o.im.is_zero() {
            return GInt { re: &self.re * &o.re, im: BigInt::zero() };
        }
        GInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &GInt {
    type Output = GInt;
    fn neg(self) -> GInt {
        GInt { re: -&self.re, im: -&self.im }
    }
}

impl fmt::Display for GInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_complex(f, &self.re.to_string(), &self.im.to_string(), self.im.is_zero(), self.re.is_zero(), self.im.is_negative())
    }
}

/// Gaussian rational a + b i with a, b rational.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GRat { re, im }
    }

    pub fn zero() -> Self {
        GRat { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        GRat { re: BigRational::one(), im: BigRational::zero() }
    }

    pub fn from_gint(z: &GInt) -> Self {
        GRat { re: BigRational::from_integer(z.re.clone()), im: BigRational::from_integer(z.im.clone()) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GRat { re: self.re.clone(), im: -&self.im }
    }

    pub fn mul_i_pow(&self, k: u32) -> Self {
        match k % 4 {
            0 => self.clone(),
            1 => GRat { re: -&self.im, im: self.re.clone() },
            2 => GRat { re: -&self.re, im: -&self.im },
            _ => GRat { re: self.im.clone(), im: -&self.re },
        }
    }

    pub fn inv(&self) -> Self {
        let n = &self.re * &self.re + &self.im * &self.im;
        GRat { re: &self.re / &n, im: -&self.im / &n }
    }

    pub fn mul_gint(&self, z: &GInt) -> Self {
        self * &GRat::from_gint(z)
    }

    /// Split into (numerator in Z[i], positive integer denominator).
    pub fn split(&self) -> (GInt, BigInt) {
        let m = self.re.denom().lcm(self.im.denom());
        let re = (&self.re * BigRational::from_integer(m.clone())).to_integer();
        let im = (&self.im * BigRational::from_integer(m.clone())).to_integer();
        (GInt { re, im }, m)
    }

    pub fn from_parts(z: &GInt, m: &BigInt) -> Self {
        GRat {
            re: BigRational::new(z.re.clone(), m.clone()),
            im: BigRational::new(z.im.clone(), m.clone()),
        }
    }
}

impl<'a> Add<&'a GRat> for &'a GRat {
    type Output = GRat;
    fn add(self, o: &GRat) -> GRat {
        GRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a GRat> for &'a GRat {
    type Output = GRat;
    fn sub(self, o: &GRat) -> GRat {
        GRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a GRat> for &'a GRat {
    type Output = GRat;
    fn mul(self, o: &GRat) -> GRat {
        if self.im.is_zero() && o.im.is_zero() {
            return GRat { re: &self.re * &o.re, im: BigRational::zero() };
        }
        GRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &GRat {
    type Output = GRat;
    fn neg(self) -> GRat {
        GRat { re: -&self.re, im: -&self.im }
    }
}

impl fmt::Display for GRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_complex(f, &self.re.to_string(), &self.im.to_string(), self.im.is_zero(), self.re.is_zero(), self.im.is_negative())
    }
}

fn fmt_complex(f: &mut fmt::Formatter<'_>, re: &str, im: &str, im_zero: bool, re_zero: bool, im_neg: bool) -> fmt::Result {
    let imag = |s: &str| -> String {
        match s {
            "1" => "i".to_string(),
            "-1" => "-i".to_string(),
            _ => format!("{s}*i"),
        }
    };
    if im_zero {
        write!(f, "{re}")
    } else if re_zero {
        write!(f, "{}", imag(im))
    } else if im_neg {
        write!(f, "({re}-{})", imag(&im[1..]))
    } else {
        write!(f, "({re}+{})", imag(im))
    }
}
