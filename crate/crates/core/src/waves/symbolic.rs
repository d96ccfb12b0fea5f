//! Exact plane waves: exponential times phase factor, with their free equations.

use super::{Physics, WaveVariant};
use crate::algebra::{convert_ordering, Mono, NSeries, Ordering, Space};
use crate::calculus::{partial_action, DIndex, DerivativeKind, Side};
use crate::error::{QError, QResult};
use crate::qcoeff::QScalar;
use crate::qexp::{build_exp, BiSeries, EigenRule, ExpVariant};
use crate::star::{p_squared_power, star_any};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

fn rat(r: &BigRational) -> QScalar {
    QScalar::from_rational(r.clone())
}

fn factorial(n: u32) -> QScalar {
    (1..=n as i64).fold(QScalar::one(), |acc, k| &acc * &QScalar::from_int(k))
}

fn t_mono(k: u32) -> Mono {
    Mono::new(0, 0, 0, k)
}

/// Σ_{k≤K} (s·i t/2m)^k p^{2k}/k! with symbolic t in the first factor.
pub fn phase_series(sign: i32, mass: &BigRational, x_ordering: Ordering, order: u32) -> QResult<BiSeries> {
    if mass.is_zero() {
        return Err(QError::InvalidParameter("mass must be nonzero".into()));
    }
    let base = rat(&(BigRational::one() / (BigRational::from_integer(2.into()) * mass))).mul_i_pow(if sign < 0 { 3 } else { 1 });
    let mut out = BiSeries::zero((Space::Position, x_ordering), (Space::Momentum, Ordering::Standard));
    for k in 0..=order {
        let c = &base.pow(k) / &factorial(k);
        for (m, d) in p_squared_power(k).terms() {
            out.add_term(t_mono(k), *m, &c * d);
        }
    }
    Ok(out)
}

/// The phase series at a fixed rational time, as a momentum series.
pub fn phase_series_at(sign: i32, t: &BigRational, mass: &BigRational, order: u32) -> QResult<NSeries> {
    let s = phase_series(sign, mass, Ordering::Standard, order)?;
    let mut out = NSeries::zero(Space::Momentum, Ordering::Standard);
    for ((tm, pm), c) in s.terms() {
        out.add_term(*pm, c * &rat(&num_traits::pow(t.clone(), tm.get(3) as usize)));
    }
    Ok(out)
}

/// e^{i s ω t}
pub fn phase_factor(omega: f64, t: f64, sign: f64) -> Complex64 {
    Complex64::new(0.0, sign * omega * t).exp()
}

/// Commutative evaluation of a momentum series at (p⁺, p³, p⁻).
pub fn eval_momentum(f: &NSeries, p: [f64; 3], q: &BigRational) -> QResult<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, c) in f.terms() {
        let mut v = c.eval(q)?;
        for k in 0..3 {
            v *= p[k].powi(m.get(k) as i32);
        }
        acc += v;
    }
    Ok(acc)
}

fn gen_binomial(a: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (a - j as f64) / (j + 1) as f64)
}

/// E^α = c^α Σ_k binom(α/2, k) (p²)^k (mc)^{α−2k}, truncated at k = order.
pub fn energy_power(p2: f64, alpha: f64, physics: &Physics, order: u32) -> QResult<f64> {
    let rest2 = physics.rest2();
    let ratio = p2.abs() / rest2;
    if ratio >= 1.0 {
        return Err(QError::SeriesDivergent(ratio));
    }
    let x = p2 / rest2;
    let sum: f64 = (0..=order).map(|k| gen_binomial(alpha / 2.0, k) * x.powi(k as i32)).sum();
    Ok(physics.c.powf(alpha) * rest2.powf(alpha / 2.0) * sum)
}

/// c^α (p² + (mc)²)^{α/2}.
pub fn energy_power_direct(p2: f64, alpha: f64, physics: &Physics) -> QResult<f64> {
    let base = p2 + physics.rest2();
    if base <= 0.0 {
        return Err(QError::InvalidParameter(format!("p² + (mc)² = {base} is not positive")));
    }
    Ok(physics.c.powf(alpha) * base.powf(alpha / 2.0))
}

/// E^{2n} = c^{2n} Σ_j binom(n, j) (mc)^{2(n−j)} p^{2j}, exactly.
pub fn energy_power_symbolic(n: u32, mass: &BigRational, c: &BigRational) -> NSeries {
    let mut out = NSeries::zero(Space::Momentum, Ordering::Standard);
    let mc2 = rat(&(mass * c * mass * c));
    let c2n = rat(c).pow(2 * n);
    let mut binom = QScalar::one();
    for j in 0..=n {
        let coef = &(&c2n * &binom) * &mc2.pow(n - j);
        for (m, d) in p_squared_power(j).terms() {
            out.add_term(*m, &coef * d);
        }
        binom = &(&binom * &QScalar::from_int((n - j) as i64)) / &QScalar::from_int(j as i64 + 1);
    }
    out
}

/// Product of an exponential with a series whose first factor only carries t.
fn with_time_factor(e: &BiSeries, f: &BiSeries, f_left: bool) -> QResult<BiSeries> {
    let target = e.second.1;
    let mut out = e.same_shape();
    for ((fx, fp), d) in f.terms() {
        if fx.spatial_degree() != 0 {
            return Err(QError::InvalidParameter("time factor depends on position".into()));
        }
        let g = convert_ordering(&NSeries::monomial(*fp, d.clone(), Space::Momentum, f.second.1), target);
        for ((x, p), c) in e.terms() {
            let pm = NSeries::monomial(*p, c.clone(), Space::Momentum, target);
            let prod = if f_left { star_any(&g, &pm)? } else { star_any(&pm, &g)? };
            for (m, v) in prod.terms() {
                out.add_term(x.mul(fx), *m, v.clone());
            }
        }
    }
    Ok(out)
}

/// A truncated plane wave: position (with t) first, upper-index momentum second.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicWave {
    pub variant: WaveVariant,
    pub order: u32,
    pub time_order: u32,
    pub series: BiSeries,
}

fn exp_of(variant: WaveVariant) -> (ExpVariant, bool) {
    match variant {
        WaveVariant::Lower => (ExpVariant::Exp, false),
        WaveVariant::Upper => (ExpVariant::Exp, true),
        WaveVariant::DualLower => (ExpVariant::ExpStar, true),
        WaveVariant::DualUpper => (ExpVariant::ExpStar, false),
    }
}

/// u_p = exp(x|ip) ⋆ e^{−itε}, u^p = e^{itε} ⋆ exp(i⁻¹p|x) and the starred duals,
/// up to the volume factor. Exponentials to order N, phases to order K.
pub fn symbolic_wave(variant: WaveVariant, mass: &BigRational, order: u32, time_order: u32) -> QResult<SymbolicWave> {
    let (ev, mf) = exp_of(variant);
    let e = build_exp(ev, mf, order)?;
    let sign = variant.time_sign() as i32;
    let phase = phase_series(sign, mass, e.series.first.1, time_order)?;
    let series = with_time_factor(&e.series, &phase, mf)?;
    Ok(SymbolicWave { variant, order, time_order, series })
}

fn d_dt(f: &NSeries) -> NSeries {
    f.map_terms(|m, c| {
        let k = m.get(3);
        (k > 0).then(|| (m.with(3, k - 1), c * &QScalar::from_int(k as i64)))
    })
}

fn laplacian(rule: EigenRule, f: &NSeries) -> QResult<NSeries> {
    let mut acc = f.same_shape();
    for a in DIndex::SPATIAL {
        let up = DerivativeKind { family: rule.family, side: rule.side, index: a, upper: true };
        let down = up.lowered();
        let (first, second) = match rule.side {
            Side::Left => (down, up),
            Side::Right => (up, down),
        };
        acc = acc.add(&partial_action(second, &partial_action(first, f)?)?);
    }
    Ok(acc)
}

/// Residuals of the free equation, restricted to the certified degrees.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveResidual {
    /// i(−s)∂_t u + Δu/2m.
    pub time: BiSeries,
    /// Δu + u ⋆ p² (or p² ⋆ u for right actions).
    pub momentum: BiSeries,
    pub max_space_degree: Option<u32>,
    pub max_time_degree: Option<u32>,
}

impl WaveResidual {
    pub fn vanishes(&self) -> bool {
        self.time.is_zero() && self.momentum.is_zero()
    }
}

fn restrict(s: &BiSeries, space: Option<u32>, time: Option<u32>) -> BiSeries {
    match (space, time) {
        (Some(a), Some(b)) => s.filter(|m, _| m.spatial_degree() <= a && m.get(3) <= b),
        _ => s.same_shape(),
    }
}

/// Free-equation residual of a symbolic wave in its own action convention.
pub fn wave_residual(w: &SymbolicWave, mass: &BigRational) -> QResult<WaveResidual> {
    let (ev, mf) = exp_of(w.variant);
    let rule = EigenRule::of(ev, mf);
    let s = &w.series;
    let lap = s.map_first(s.first, |f| laplacian(rule, f))?;
    let dt = s.map_first(s.first, |f| Ok(d_dt(f)))?;
    let k = if w.variant.time_sign() < 0.0 { QScalar::i() } else { -QScalar::i() };
    let inv2m = rat(&(BigRational::one() / (BigRational::from_integer(2.into()) * mass)));
    let time = dt.scale(&k).add(&lap.scale(&inv2m));
    let p2 = BiSeries::tensor(
        &NSeries::one(Space::Position, s.first.1),
        &p_squared_power(1),
    );
    let momentum = lap.add(&with_time_factor(s, &p2, rule.side == Side::Right)?);
    let space = w.order.checked_sub(2);
    let tdeg = w.time_order.checked_sub(1);
    Ok(WaveResidual {
        time: restrict(&time, space, tdeg),
        momentum: restrict(&momentum, space, tdeg),
        max_space_degree: space,
        max_time_degree: tdeg,
    })
}

/// u_p ⋆ e^{−itE} split as even + odd·E in a formal token E with E² = c²(p² + (mc)²).
#[derive(Clone, Debug, PartialEq)]
pub struct KgSymbolic {
    pub even: BiSeries,
    pub odd: BiSeries,
    pub order: u32,
    pub time_order: u32,
    pub mass: BigRational,
    pub c: BigRational,
}

/// Klein-Gordon positive-frequency wave without its constant normalization.
pub fn kg_symbolic(mass: &BigRational, c: &BigRational, order: u32, time_order: u32) -> QResult<KgSymbolic> {
    if mass.is_zero() || c.is_zero() {
        return Err(QError::InvalidParameter("mass and light speed must be nonzero".into()));
    }
    let e = build_exp(ExpVariant::Exp, false, order)?.series;
    let mut even = BiSeries::zero((Space::Position, e.first.1), (Space::Momentum, Ordering::Standard));
    let mut odd = even.clone();
    for n in 0..=time_order {
        // (−i)^n / n!
        let c_n = &QScalar::one().mul_i_pow((3 * n) % 4) / &factorial(n);
        let tok = energy_power_symbolic(n / 2, mass, c);
        let target = if n % 2 == 0 { &mut even } else { &mut odd };
        for (m, d) in tok.terms() {
            target.add_term(t_mono(n), *m, &c_n * d);
        }
    }
    let even = with_time_factor(&e, &even, false)?;
    let odd = with_time_factor(&e, &odd, false)?;
    Ok(KgSymbolic { even, odd, order, time_order, mass: mass.clone(), c: c.clone() })
}

/// c⁻²∂_t²φ − Δφ + (mc)²φ for the even and odd parts, restricted to certified degrees.
pub fn kg_residual(kg: &KgSymbolic) -> QResult<(BiSeries, BiSeries)> {
    let rule = EigenRule::of(ExpVariant::Exp, false);
    let c2inv = rat(&(BigRational::one() / (&kg.c * &kg.c)));
    let mc2 = rat(&(&kg.mass * &kg.c * &kg.mass * &kg.c));
    let space = kg.order.checked_sub(2);
    let tdeg = kg.time_order.checked_sub(2);
    let part = |s: &BiSeries| -> QResult<BiSeries> {
        let dtt = s.map_first(s.first, |f| Ok(d_dt(&d_dt(f))))?;
        let lap = s.map_first(s.first, |f| laplacian(rule, f))?;
        Ok(restrict(&dtt.scale(&c2inv).sub(&lap).add(&s.scale(&mc2)), space, tdeg))
    };
    Ok((part(&kg.even)?, part(&kg.odd)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_power_zero_is_one() {
        let ph = Physics::new(1.0, 1.0).unwrap();
        assert_eq!(energy_power(0.3, 0.0, &ph, 5).unwrap(), 1.0);
        assert!(matches!(energy_power(1.5, 1.0, &ph, 5), Err(QError::SeriesDivergent(_))));
    }
}
