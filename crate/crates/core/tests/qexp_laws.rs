use qspace::algebra::{convert_ordering, parse_series};
use qspace::calculus::DIndex;
use qspace::qexp::*;
use qspace::{Mono, NSeries, Ordering, QError, QScalar, Space};

fn reversed(s: &str) -> NSeries {
    parse_series(s).unwrap().with_ordering(Ordering::Reversed)
}

fn standard(s: &str) -> NSeries {
    parse_series(s).unwrap()
}

#[test]
fn every_variant_satisfies_its_eigenvalue_equation() {
    for v in ExpVariant::ALL {
        for mf in [false, true] {
            let e = build_exp(v, mf, 5).unwrap();
            assert_eq!(e.coeff(&Mono::ONE, &Mono::ONE), QScalar::one());
            for a in DIndex::SPATIAL {
                let r = check_eigen(&e, a).unwrap();
                assert_eq!(r.certified, Some(4));
                assert!(r.vanishes(), "{v:?} momentum_first={mf} {a:?}: {}", r.residual);
            }
        }
    }
}

#[test]
fn closed_forms_match_the_eigenvalue_solve() {
    for mf in [false, true] {
        for v in [ExpVariant::Exp, ExpVariant::ExpBar] {
            let closed = build_exp(v, mf, 5).unwrap();
            let solved = solve_eigen(EigenRule::of(v, mf), 5).unwrap();
            assert_eq!(closed.series, solved, "{v:?} momentum_first={mf}");
        }
    }
}

#[test]
fn closed_forms_pair_axes_diagonally() {
    let e = build_exp(ExpVariant::Exp, false, 6).unwrap();
    for ((x, p), _) in e.series.terms() {
        assert_eq!((x.get(0), x.get(1), x.get(2)), (p.get(2), p.get(1), p.get(0)));
    }
}

#[test]
fn starred_exponentials_are_barred_ones_with_reordered_momenta() {
    let pairs = [(ExpVariant::ExpStar, ExpVariant::ExpBar), (ExpVariant::ExpBarStar, ExpVariant::Exp)];
    for (star, plain) in pairs {
        for mf in [false, true] {
            let s = build_exp(star, mf, 4).unwrap();
            let p = build_exp(plain, mf, 4).unwrap();
            let target = s.series.second.1;
            let converted = p.series.map_second((Space::Momentum, target), |g| Ok(convert_ordering(g, target))).unwrap();
            assert_eq!(s.series, converted, "{star:?} momentum_first={mf}");
        }
    }
}

#[test]
fn perturbing_a_coefficient_breaks_the_eigen_equation() {
    let mut e = build_exp(ExpVariant::Exp, false, 3).unwrap();
    e.series.add_term(Mono::spatial(1, 1, 0), Mono::spatial(0, 1, 1), QScalar::q());
    let bad = DIndex::SPATIAL.iter().any(|a| !check_eigen(&e, *a).unwrap().vanishes());
    assert!(bad);
}

#[test]
fn translation_matches_the_explicit_double_sum() {
    for s in ["1", "x3", "x+ x-", "x+^2 x3 x-", "x3^2 x-", "x3^3", "x+ x3^2 x-^2 + q x-^3", "x+^3 x3^2"] {
        let f = reversed(s);
        let a = translate(&f, TranslationKind::Plus, 6).unwrap();
        let b = translate_explicit(&f).unwrap();
        assert_eq!(a, b, "{s}");
    }
}

#[test]
fn translation_of_linear_functions_adds() {
    let t = translate(&standard("x3"), TranslationKind::PlusBar, 3).unwrap();
    let mut want = BiSeries::zero((Space::Position, Ordering::Standard), (Space::Position, Ordering::Standard));
    want.add_term(Mono::spatial(0, 1, 0), Mono::ONE, QScalar::one());
    want.add_term(Mono::ONE, Mono::spatial(0, 1, 0), QScalar::one());
    assert_eq!(t, want);
    let one = translate(&standard("1"), TranslationKind::PlusBar, 0).unwrap();
    assert_eq!(one.second_at_zero(), standard("1"));
}

#[test]
fn translation_requires_enough_truncation() {
    let err = translate(&standard("x3^3"), TranslationKind::PlusBar, 2).unwrap_err();
    assert_eq!(err, QError::TruncationInsufficient { degree: 3, order: 2 });
    let err = translate(&standard("x3"), TranslationKind::Plus, 2).unwrap_err();
    assert!(matches!(err, QError::OrderingMismatch { .. }));
}

#[test]
fn u_operators_convert_orderings() {
    for s in ["x+ x-", "x+^2 x3 x-", "x+ x3^2 x-^2", "x+^3 x-^2 + x3"] {
        let f = standard(s);
        assert_eq!(u_hat(&f), convert_ordering(&f, Ordering::Reversed), "{s}");
        let r = reversed(s);
        assert_eq!(u_hat_inv(&r), convert_ordering(&r, Ordering::Standard), "{s}");
        assert_eq!(u_hat_inv(&u_hat(&f)), f);
    }
}

#[test]
fn inversion_negates_generators() {
    for v in ["x+", "x3", "x-"] {
        assert_eq!(qinvert(&reversed(v), InversionKind::Minus).unwrap(), reversed(v).neg());
        assert_eq!(qinvert(&standard(v), InversionKind::MinusBar).unwrap(), standard(v).neg());
    }
    assert_eq!(qinvert(&reversed("1"), InversionKind::Minus).unwrap(), reversed("1"));
}

#[test]
fn inversion_reduces_to_negation_at_q_one() {
    let f = reversed("x3^2 + x+ x- + 2 x+ x3 x-");
    let g = qinvert(&f, InversionKind::Minus).unwrap();
    let one = num_rational::BigRational::from_integer(1.into());
    for (m, c) in g.terms() {
        let sign = if m.degree() % 2 == 1 { -1.0 } else { 1.0 };
        let want = f.coeff(m).eval(&one).unwrap() * sign;
        assert!((c.eval(&one).unwrap() - want).norm() < 1e-12, "{m:?}");
    }
}

#[test]
fn hopf_laws_on_monomials_up_to_degree_four() {
    for kind in [TranslationKind::Plus, TranslationKind::PlusBar] {
        for d in 0..=4 {
            for m in monomials_of_degree(d) {
                let f = NSeries::monomial(m, QScalar::one(), Space::Position, kind.ordering());
                let (l, r) = antipode_defect(&f, kind, 4).unwrap();
                assert!(l.is_zero() && r.is_zero(), "{kind:?} {m:?}");
                let (a, b) = counit_defect(&f, kind, 4).unwrap();
                assert!(a.is_zero() && b.is_zero(), "{kind:?} {m:?}");
            }
        }
    }
}

#[test]
fn addition_theorems_and_inverse_exponentials() {
    for kind in [TranslationKind::Plus, TranslationKind::PlusBar] {
        assert!(addition_theorem_defect(kind, 5).unwrap().is_empty(), "{kind:?}");
        assert!(inverse_exp_defect(kind, 5).unwrap().is_zero(), "{kind:?}");
    }
}
