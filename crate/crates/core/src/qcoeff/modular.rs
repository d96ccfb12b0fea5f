//! Polynomial gcd over Z[i] by reduction modulo primes p = 1 (mod 4).

use super::gauss::GInt;
use super::poly::ZPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::OnceLock;

#[derive(Clone, Copy, Debug)]
struct Prime {
    p: u64,
    iota: u64,
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn primes() -> &'static [Prime] {
    static PRIMES: OnceLock<Vec<Prime>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::new();
        let mut n: u64 = (1u64 << 62) - 3;
        while out.len() < 400 {
            if is_prime(n) {
                let mut g = 2;
                while powmod(g, (n - 1) / 2, n) != n - 1 {
                    g += 1;
                }
                let iota = powmod(g, (n - 1) / 4, n);
                debug_assert_eq!(mulmod(iota, iota, n), n - 1);
                out.push(Prime { p: n, iota });
            }
            n -= 4;
        }
        out
    })
}

fn reduce(z: &BigInt, p: u64) -> u64 {
    if let Some(v) = z.to_i64() {
        return v.rem_euclid(p as i64) as u64;
    }
    z.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

fn image(a: &ZPoly, p: u64, s: u64) -> Vec<u64> {
    let mut v: Vec<u64> = a
        .coeffs()
        .iter()
        .map(|z| (reduce(&z.re, p) + mulmod(reduce(&z.im, p), s, p)) % p)
        .collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn gint_image(z: &GInt, p: u64, s: u64) -> u64 {
    (reduce(&z.re, p) + mulmod(reduce(&z.im, p), s, p)) % p
}

fn monic(v: &mut [u64], p: u64) {
    let inv = powmod(*v.last().unwrap(), p - 2, p);
    for x in v.iter_mut() {
        *x = mulmod(*x, inv, p);
    }
}

fn rem_in_place(a: &mut Vec<u64>, b: &[u64], p: u64) {
    let db = b.len() - 1;
    let inv = powmod(b[db], p - 2, p);
    while a.len() > db {
        let t = mulmod(*a.last().unwrap(), inv, p);
        let off = a.len() - 1 - db;
        for (j, &bj) in b.iter().enumerate() {
            let s = mulmod(t, bj, p);
            a[off + j] = (a[off + j] + p - s) % p;
        }
        while a.last() == Some(&0) {
            a.pop();
        }
    }
}

fn gcd_fp(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    while !y.is_empty() {
        rem_in_place(&mut x, &y, p);
        std::mem::swap(&mut x, &mut y);
    }
    monic(&mut x, p);
    x
}

fn sym_lift(x: &BigInt, m: &BigInt, half: &BigInt) -> BigInt {
    if x > half {
        x - m
    } else {
        x.clone()
    }
}

/// Gcd of two primitive nonzero polynomials together with both cofactors.
/// The gcd is primitive with a first-quadrant leading coefficient.
pub fn gcd_with_cofactors(a: &ZPoly, b: &ZPoly) -> (ZPoly, ZPoly, ZPoly) {
    if a.deg() == 0 || b.deg() == 0 {
        return (ZPoly::one(), a.clone(), b.clone());
    }
    if a == b {
        let k = a.lc().canonical_unit();
        let unit = ZPoly::constant(GInt::one().mul_i_pow((4 - k) % 4));
        return (a.mul_i_pow(k), unit.clone(), unit);
    }
    let gamma = a.lc().gcd(b.lc());
    let mut d_cur = usize::MAX;
    let mut m = BigInt::one();
    let mut acc_re: Vec<BigInt> = Vec::new();
    let mut acc_im: Vec<BigInt> = Vec::new();
    let mut prev: Option<Vec<GInt>> = None;
    for pr in primes() {
        let p = pr.p;
        let s1 = pr.iota;
        let s2 = p - pr.iota;
        if [s1, s2].iter().any(|&s| gint_image(a.lc(), p, s) == 0 || gint_image(b.lc(), p, s) == 0) {
            continue;
        }
        let g1 = gcd_fp(&image(a, p, s1), &image(b, p, s1), p);
        let g2 = gcd_fp(&image(a, p, s2), &image(b, p, s2), p);
        if g1.len() != g2.len() {
            continue;
        }
        let d = g1.len() - 1;
        if d == 0 {
            return (ZPoly::one(), a.clone(), b.clone());
        }
        if d > d_cur {
            continue;
        }
        if d < d_cur {
            d_cur = d;
            m = BigInt::one();
            acc_re = vec![BigInt::zero(); d + 1];
            acc_im = vec![BigInt::zero(); d + 1];
            prev = None;
        }
        let ga1 = gint_image(&gamma, p, s1);
        let ga2 = gint_image(&gamma, p, s2);
        let inv2 = powmod(2, p - 2, p);
        let inv2i = powmod(mulmod(2, s1, p), p - 2, p);
        let pb = BigInt::from(p);
        let minv = {
            let mm = reduce(&m, p);
            powmod(mm, p - 2, p)
        };
        for k in 0..=d {
            let h1 = mulmod(ga1, g1[k], p);
            let h2 = mulmod(ga2, g2[k], p);
            let re = mulmod((h1 + h2) % p, inv2, p);
            let im = mulmod((h1 + p - h2) % p, inv2i, p);
            for (acc, val) in [(&mut acc_re[k], re), (&mut acc_im[k], im)] {
                let cur = reduce(acc, p);
                let t = mulmod((val + p - cur) % p, minv, p);
                *acc = &*acc + &m * BigInt::from(t);
            }
        }
        m *= &pb;
        let half = &m >> 1;
        let cand: Vec<GInt> = (0..=d)
            .map(|k| GInt { re: sym_lift(&acc_re[k], &m, &half), im: sym_lift(&acc_im[k], &m, &half) })
            .collect();
        if prev.as_ref() == Some(&cand) {
            let h = ZPoly::from_coeffs(cand.clone());
            let cont = h.content();
            let mut g = h.div_scalar_exact(&cont);
            g = g.mul_i_pow(g.lc().canonical_unit());
            if let (Some(qa), Some(qb)) = (a.div_exact(&g), b.div_exact(&g)) {
                return (g, qa, qb);
            }
        }
        prev = Some(cand);
    }
    panic!("modular gcd did not converge");
}

/// True when the two polynomials have no common factor of positive degree.
pub fn coprime(a: &ZPoly, b: &ZPoly) -> bool {
    if a.deg() == 0 || b.deg() == 0 {
        return true;
    }
    for pr in primes().iter().take(4) {
        let p = pr.p;
        if gint_image(a.lc(), p, pr.iota) == 0 {
            continue;
        }
        let g = gcd_fp(&image(a, p, pr.iota), &image(b, p, pr.iota), p);
        if g.len() == 1 {
            return true;
        }
    }
    gcd_with_cofactors(a, b).0.deg() == 0
}
