mod common;

use common::rat;
use proptest::prelude::*;
use qspace::algebra::*;
use qspace::lattice::{LatticeGrid, SpaceGrid, TimeAxis};
use qspace::qcoeff::{DeformationParams, QScalar};
use qspace::star::*;
use qspace::QError;

fn s(t: &str) -> NSeries {
    parse_series(t).unwrap()
}

fn mono(max: u32) -> impl Strategy<Value = Mono> {
    (0..=max, 0..=max, 0..=max, 0u32..=1)
        .prop_filter("degree", move |(a, b, c, _)| a + b + c <= max)
        .prop_map(|(a, b, c, t)| Mono::new(a, b, c, t))
}

fn poly(max: u32, ordering: Ordering) -> impl Strategy<Value = NSeries> {
    prop::collection::vec((mono(max), -3i64..=3, -2i64..=2, 0u32..2), 1..4).prop_map(move |terms| {
        NSeries::from_terms(
            terms.into_iter().map(|(m, c, e, i)| (m, QScalar::from_int(c).mul_q_pow(e).mul_i_pow(i))),
            Space::Position,
            ordering,
        )
    })
}

fn word(max_len: usize) -> impl Strategy<Value = NCWord> {
    prop::collection::vec(prop::sample::select(vec![Gen::Plus, Gen::Three, Gen::Minus, Gen::Zero]), 0..=max_len)
        .prop_map(NCWord::new)
}

fn ordering() -> impl Strategy<Value = Ordering> {
    prop::sample::select(vec![Ordering::Standard, Ordering::Reversed])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn star_is_associative(o in ordering(), f in poly(3, Ordering::Standard), g in poly(3, Ordering::Standard), h in poly(3, Ordering::Standard)) {
        let (f, g, h) = (f.with_ordering(o), g.with_ordering(o), h.with_ordering(o));
        let left = star_any(&star_any(&f, &g).unwrap(), &h).unwrap();
        let right = star_any(&f, &star_any(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn star_of_monomials_is_their_normal_ordered_word(o in ordering(), a in mono(4), b in mono(4)) {
        let m = |x: Mono| NSeries::monomial(x, QScalar::one(), Space::Position, o);
        let w = NCWord::from_mono(&a, o).concat(&NCWord::from_mono(&b, o));
        prop_assert_eq!(star_any(&m(a), &m(b)).unwrap(), normal_order_to(&w, o, Space::Position));
    }

    #[test]
    fn normal_ordering_is_multiplicative(u in word(5), v in word(5)) {
        let lhs = normal_order_oracle(&u.concat(&v));
        let rhs = star(&normal_order_oracle(&u), &normal_order_oracle(&v)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugation_is_an_antimultiplicative_involution(f in poly(3, Ordering::Standard), g in poly(3, Ordering::Standard)) {
        prop_assert_eq!(f.conjugate().conjugate(), f.clone());
        let lhs = star(&f, &g).unwrap().conjugate();
        prop_assert_eq!(lhs, star(&g.conjugate(), &f.conjugate()).unwrap());
    }

    #[test]
    fn ordering_conversion_is_an_algebra_isomorphism(f in poly(3, Ordering::Standard), g in poly(3, Ordering::Standard)) {
        let rev = |h: &NSeries| convert_ordering(h, Ordering::Reversed);
        prop_assert_eq!(rev(&star(&f, &g).unwrap()), star_reversed(&rev(&f), &rev(&g)).unwrap());
        prop_assert_eq!(convert_ordering(&rev(&f), Ordering::Standard), f);
    }

    #[test]
    fn printing_and_parsing_round_trip(f in poly(4, Ordering::Standard)) {
        prop_assert_eq!(parse_series(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn unit_and_zero(f in poly(4, Ordering::Standard)) {
        let one = NSeries::one(Space::Position, Ordering::Standard);
        prop_assert_eq!(star(&one, &f).unwrap(), f.clone());
        prop_assert_eq!(star(&f, &one).unwrap(), f.clone());
        let zero = NSeries::zero(Space::Position, Ordering::Standard);
        prop_assert!(star(&f, &zero).unwrap().is_zero());
    }
}

#[test]
fn relations_hold_in_both_orderings() {
    for o in [Ordering::Standard, Ordering::Reversed] {
        let v = |k| NSeries::var(k, Space::Position, o);
        let st = |a: &NSeries, b: &NSeries| star_any(a, b).unwrap();
        let (p, t, m, z) = (v(0), v(1), v(2), v(3));
        assert_eq!(st(&t, &p), st(&p, &t).scale(&QScalar::q_pow(2)));
        assert_eq!(st(&t, &m), st(&m, &t).scale(&QScalar::q_pow(-2)));
        assert_eq!(st(&m, &p).sub(&st(&p, &m)), st(&t, &t).scale(&QScalar::lambda()));
        for x in [&p, &t, &m] {
            assert_eq!(st(&z, x), st(x, &z));
        }
    }
}

#[test]
fn documented_oracle_and_conjugation_values() {
    use Gen::*;
    assert_eq!(normal_order_oracle(&NCWord::new(vec![Three, Plus])), s("q^2 x+ x3"));
    assert_eq!(normal_order_oracle(&NCWord::new(vec![Minus, Plus])), s("x+ x- + lambda x3^2"));
    assert_eq!(normal_order_oracle(&NCWord::new(vec![Plus, Three, Minus])), s("x+ x3 x-"));
    assert_eq!(s("x+").conjugate(), s("-q x-"));
    assert_eq!(s("x-").conjugate(), s("-q^-1 x+"));
    assert_eq!(s("t").conjugate(), s("t"));
    assert_eq!(s("i x3").conjugate(), s("-i x3"));
}

#[test]
fn diagonal_operators() {
    assert_eq!(s("x3^2").number_operator(1), s("2 x3^2"));
    assert_eq!(s("x+").scale_operator(0, 2), s("q^2 x+"));
    assert_eq!(star_monomials(&Mono::spatial(0, 1, 0), &Mono::spatial(1, 0, 0)).len(), 1);
}

#[test]
fn star_powers_of_p_squared() {
    let p2 = p_squared();
    assert_eq!(p_squared_power(0), NSeries::one(Space::Momentum, Ordering::Standard));
    assert_eq!(p_squared_power(1), p2);
    for k in 1..=3 {
        assert_eq!(p_squared_power(k), star_pow(&p2, k).unwrap(), "k = {k}");
    }
    let v = IndexedVector::coordinates(Space::Momentum);
    let Contracted::Scalar(sq) = metric_contract(&v, ContractMode::Square).unwrap() else { panic!() };
    assert_eq!(sq, p2);
}

#[test]
fn metric_raises_what_it_lowers() {
    let v = IndexedVector::coordinates(Space::Momentum);
    let Contracted::Vector(low) = metric_contract(&v, ContractMode::Lower).unwrap() else { panic!() };
    assert_eq!(low.comps[0], lower_label("+", Space::Momentum).unwrap());
    let Contracted::Vector(up) = metric_contract(&low, ContractMode::Raise).unwrap() else { panic!() };
    assert_eq!(up, v);
    assert!(matches!(metric_contract(&v, ContractMode::Raise), Err(QError::BadIndex(_))));
    assert!(matches!(lower_label("x", Space::Momentum), Err(QError::BadIndex(_))));
}

#[test]
fn parse_errors_carry_positions() {
    assert!(matches!(parse_series("x+^"), Err(QError::ParseError { .. })));
    assert!(matches!(parse_series("2 * * x3"), Err(QError::ParseError { .. })));
    assert!(matches!(parse_series("x7"), Err(QError::ParseError { .. })));
}

#[test]
fn sampling_matches_pointwise_horner_evaluation() {
    let q = rat(3, 2);
    let params = DeformationParams::new(q.clone(), 8).unwrap();
    let space = SpaceGrid::symmetric(q, rat(1, 2), -1, 1, 1).unwrap();
    let grid = LatticeGrid { space: space.clone(), time: TimeAxis::new(0.0, 1.0, 3).unwrap() };
    let one = sample_to_lattice(&s("1"), &grid, &params).unwrap();
    assert!(one.values.iter().all(|v| *v == num_complex::Complex64::new(1.0, 0.0)));
    let f = s("2 x+^2 x3 - 1/3 x3^3 + i x- t - q x+ x-");
    let field = sample_to_lattice(&f, &grid, &params).unwrap();
    let qf = 1.5;
    for (k, t) in grid.time.times().into_iter().enumerate() {
        for p in 0..space.npoints() {
            let [a, b, c] = space.point(p);
            // Horner in x3 with the remaining terms added directly
            let poly_x3 = ((-1.0 / 3.0) * b + 0.0) * b * b + 2.0 * a * a * b;
            let want = num_complex::Complex64::new(poly_x3 - qf * a * c, c * t);
            assert!((field.at(k, p) - want).norm() < 1e-12, "{p}");
        }
    }
    assert!(sample_to_lattice(&s("p3").with_space(Space::Momentum), &grid, &params).is_err());
}
