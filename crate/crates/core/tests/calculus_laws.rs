mod common;

use common::rat;
use num_complex::Complex64;
use proptest::prelude::*;
use qspace::algebra::{convert_ordering, parse_series, sample_to_lattice, Mono, NSeries, Ordering, Space};
use qspace::calculus::*;
use qspace::lattice::{Axis, LatticeField, LatticeGrid, SpaceGrid, TimeAxis};
use qspace::qcoeff::{qnumber, DeformationParams, QScalar};
use qspace::QError;

fn s(t: &str) -> NSeries {
    parse_series(t).unwrap()
}

fn poly(max: u32) -> impl Strategy<Value = NSeries> {
    let mono = (0..=max, 0..=max, 0..=max, 0u32..=2)
        .prop_filter("degree", move |(a, b, c, _)| a + b + c <= max)
        .prop_map(|(a, b, c, t)| Mono::new(a, b, c, t));
    prop::collection::vec((mono, -3i64..=3, -2i64..=2, 0u32..2), 1..4).prop_map(|terms| {
        NSeries::from_terms(
            terms.into_iter().map(|(m, c, e, i)| (m, QScalar::from_int(c).mul_q_pow(e).mul_i_pow(i))),
            Space::Position,
            Ordering::Standard,
        )
    })
}

fn d(i: DIndex, f: &NSeries) -> NSeries {
    partial_action(DerivativeKind::left(i), f).unwrap()
}

const ALL: [DIndex; 4] = [DIndex::Plus, DIndex::Three, DIndex::Minus, DIndex::Zero];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn derivatives_obey_the_derivative_algebra(f in poly(5)) {
        let (p, t, m) = (DIndex::Plus, DIndex::Three, DIndex::Minus);
        let q2 = QScalar::q_pow(2);
        prop_assert_eq!(d(p, &d(t, &f)), d(t, &d(p, &f)).scale(&q2));
        prop_assert_eq!(d(t, &d(m, &f)), d(m, &d(t, &f)).scale(&q2));
        prop_assert_eq!(d(p, &d(m, &f)).sub(&d(m, &d(p, &f))), d(t, &d(t, &f)).scale(&QScalar::lambda()));
        for i in DIndex::SPATIAL {
            prop_assert_eq!(d(DIndex::Zero, &d(i, &f)), d(i, &d(DIndex::Zero, &f)));
        }
    }

    #[test]
    fn inverse_derivatives_are_left_inverses(f in poly(5)) {
        for i in ALL {
            for kind in [DerivativeKind::left(i), DerivativeKind::left(i).raised()] {
                prop_assert_eq!(partial_action(kind, &inverse_partial(kind, &f).unwrap()).unwrap(), f.clone());
            }
            let g = convert_ordering(&f, Ordering::Reversed);
            let kind = DerivativeKind::hat_left(i);
            prop_assert_eq!(partial_action(kind, &inverse_partial(kind, &g).unwrap()).unwrap(), g);
        }
        prop_assert_eq!(inverse_minus_closed_form(&f), inverse_partial(DerivativeKind::left(DIndex::Minus), &f).unwrap());
    }

    #[test]
    fn right_actions_are_conjugated_left_actions(f in poly(4)) {
        for i in ALL {
            let lhs = partial_action(DerivativeKind::right(i), &f).unwrap();
            let rhs = d(i, &f.conjugate()).conjugate().neg();
            prop_assert_eq!(lhs, rhs);
            let g = f.clone().with_ordering(Ordering::Reversed);
            let lhs = partial_action(DerivativeKind::hat_right(i), &g).unwrap();
            let rhs = partial_action(DerivativeKind::hat_left(i), &g.conjugate()).unwrap().conjugate().neg();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn jackson_inverse_undoes_the_derivative(f in poly(5), axis in 0usize..3, k in prop::sample::select(vec![-2i64, 2, 4])) {
        prop_assert_eq!(jackson_d(&jackson_d_inv(&f, axis, k), axis, k), f);
    }

    #[test]
    fn derivatives_lower_the_degree_and_kill_constants(f in poly(5), c in -5i64..5) {
        for i in ALL {
            let g = d(i, &f);
            prop_assert!(g.is_zero() || g.degree() < f.degree());
            prop_assert!(d(i, &NSeries::constant(QScalar::from_int(c), Space::Position, Ordering::Standard)).is_zero());
        }
    }
}

#[test]
fn documented_actions() {
    assert_eq!(d(DIndex::Plus, &s("x+^2")), s("(1+q^4) x+"));
    assert_eq!(d(DIndex::Minus, &s("x3^2")), s("lambda (1+q^2) x+"));
    assert_eq!(d(DIndex::Zero, &s("t^2 x3")), s("2 t x3"));
    assert_eq!(jackson_d(&s("x+^3"), 0, 4), s("x+^2").scale(&qnumber(3, 4)));
    assert!(jackson_d(&s("7"), 1, 2).is_zero());
    let inv = inverse_partial(DerivativeKind::left(DIndex::Plus), &s("x+")).unwrap();
    assert_eq!(inv, s("x+^2").scale(&qnumber(2, 4).inv().unwrap()));
    assert_eq!(inverse_partial(DerivativeKind::left(DIndex::Three), &s("1")).unwrap(), s("x3"));
    let r = s("x+^2").with_ordering(Ordering::Reversed);
    assert!(matches!(partial_action(DerivativeKind::left(DIndex::Plus), &r), Err(QError::OrderingMismatch { .. })));
    assert!(inverse_partial(DerivativeKind::right(DIndex::Plus), &s("x+")).is_err());
}

fn grid(q: (i64, i64)) -> (LatticeGrid, DeformationParams) {
    let q = rat(q.0, q.1);
    let space = SpaceGrid::symmetric(q.clone(), rat(1, 1), -2, 2, 1).unwrap();
    let g = LatticeGrid { space, time: TimeAxis::new(0.0, 1.0, 2).unwrap() };
    (g, DeformationParams::new(q, 8).unwrap())
}

#[test]
fn lattice_derivatives_match_symbolic_ones() {
    let (g, params) = grid((3, 2));
    let f = s("x3^2 x+ - 3 x-^3 + 2 x+^2 x3 x- + t x3");
    let field = sample_to_lattice(&f, &g, &params).unwrap();
    for (axis, k) in [(Axis::Plus, 0), (Axis::Three, 1), (Axis::Minus, 2)] {
        for base in [2, 4, -2] {
            let num = jackson_d_lattice(&field, axis, base).unwrap();
            let want = sample_to_lattice(&jackson_d(&f, k, base), &g, &params).unwrap();
            let mut checked = 0;
            for s in 0..g.time.n {
                for p in 0..g.space.npoints() {
                    if num.valid[p] {
                        checked += 1;
                        let (a, b) = (num.field.at(s, p), want.at(s, p));
                        assert!((a - b).norm() < 1e-11 * (1.0 + b.norm()), "{axis:?} {base} {p}");
                    }
                }
            }
            assert!(checked > 0);
        }
    }
    assert!(matches!(jackson_d_lattice(&field, Axis::Plus, 1), Err(QError::InvalidParameter(_))));
    assert!(matches!(jackson_d_lattice(&field, Axis::Plus, 0), Err(QError::OriginSingularity)));
}

/// Σ w·D_Q F telescopes to boundary values of F along each ray of the axis.
#[test]
fn jackson_sums_of_derivatives_telescope() {
    let (g, params) = grid((5, 4));
    let f = s("x3^3 x+ + 2 x3^2 - x- x3 + 1/2 x+^2 x-");
    let field = sample_to_lattice(&f, &g, &params).unwrap();
    let dq = jackson_d_lattice(&field, Axis::Three, 2).unwrap();
    let mut masked = dq.field.clone();
    let n = g.space.npoints();
    for p in 0..n {
        if !dq.valid[p] {
            for s in 0..g.time.n {
                masked.values[s * n + p] = Complex64::new(0.0, 0.0);
            }
        }
    }
    let got = integrate_space(&masked, 0, 1.0).unwrap();
    let w = [g.space.weights(Axis::Plus), g.space.weights(Axis::Minus)];
    let shape = g.space.shape();
    let a3 = &g.space.axes[1];
    let mut want = Complex64::new(0.0, 0.0);
    for i in 0..shape[0] {
        for k in 0..shape[2] {
            for sign in [-1, 1] {
                let hi = g.space.flat([i, a3.index_of(sign, a3.jmax).unwrap(), k]);
                let lo = g.space.flat([i, a3.index_of(sign, a3.jmin).unwrap(), k]);
                want += w[0][i] * w[1][k] * (field.at(0, hi) - field.at(0, lo)) * sign as f64;
            }
        }
    }
    assert!((got - want).norm() < 1e-9 * (1.0 + want.norm()), "{got} vs {want}");
}

#[test]
fn jackson_integrals_respect_conjugation_and_support() {
    let (g, _) = grid((3, 2));
    let n = g.space.npoints();
    let zero = LatticeField::zeros(&g);
    assert_eq!(integrate_space(&zero, 0, DEFAULT_BOUNDARY_FRACTION).unwrap(), Complex64::new(0.0, 0.0));
    let inner = g.space.flat([3, 4, 5]);
    let mut one = zero.clone();
    one.values[inner] = Complex64::new(2.0, -1.0);
    let w = g.space.point_weights();
    assert_eq!(integrate_space(&one, 0, DEFAULT_BOUNDARY_FRACTION).unwrap(), one.values[inner] * w[inner]);
    let bump = LatticeField::from_fn(&g, |x, _| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        Complex64::new(x[1], x[0] - 0.3 * x[2]) * (-4.0 * r2).exp()
    });
    let a = integrate_space(&bump, 1, 1.0).unwrap();
    let b = integrate_space(&bump.conjugate().unwrap(), 1, 1.0).unwrap();
    assert!((b - a.conj()).norm() < 1e-12 * (1.0 + a.norm()), "{a} {b}");
    let mut edge = zero.clone();
    edge.values[0] = Complex64::new(1.0, 0.0);
    edge.values[n / 2] = Complex64::new(1e-3, 0.0);
    assert!(matches!(integrate_space(&edge, 0, DEFAULT_BOUNDARY_FRACTION), Err(QError::BoundaryDominated { .. })));
}
