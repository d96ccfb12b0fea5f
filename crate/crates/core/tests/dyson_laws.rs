mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use qspace::dyson::*;
use qspace::lattice::TimeAxis;
use qspace::scatter::*;
use qspace::waves::*;
use qspace::QError;

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A smooth, non-commuting hermitian matrix path.
fn matrix_path(time: &TimeAxis, d: usize) -> InteractionMatrixFn {
    let mats = (0..time.n)
        .map(|k| {
            let t = time.t(k);
            DMatrix::from_fn(d, d, |r, c| {
                let (r, c) = (r as f64, c as f64);
                if r == c {
                    Complex64::from((1.0 + r) * (t * (1.0 + 0.3 * r)).cos())
                } else {
                    let a = 0.4 * ((r + 2.0 * c) * t + 0.1 * (r - c)).sin();
                    let b = 0.3 * (r - c) * (t + 0.2).cos();
                    Complex64::new(a, b)
                }
            })
        })
        .map(|m: DMatrix<Complex64>| (&m + m.adjoint()) * Complex64::from(0.5))
        .collect();
    InteractionMatrixFn::from_matrices(time.clone(), mats).unwrap()
}

#[test]
fn interaction_matrices_are_hermitian_for_real_potentials() {
    let f = family(4, 2, 1.0, 6);
    let v = gaussian(&f, 30.0, 0.35);
    for pl in [Placement::Lower, Placement::Upper] {
        let vi = InteractionMatrixFn::new(&f, &v, pl).unwrap();
        for k in [0, 3, 6] {
            let mut worst: f64 = 0.0;
            for a in 0..f.np() {
                for b in 0..f.np() {
                    worst = worst.max((vi.entry(a, b, k).unwrap() - vi.entry(b, a, k).unwrap().conj()).norm());
                }
            }
            assert!(worst < 1e-12, "{pl:?} k={k}: {worst:e}");
            assert!(max_abs(vi.at(k)) > 1e-6);
        }
    }
    let zero = InteractionMatrixFn::new(&f, &Potential::zero(&f.grid()), Placement::Lower).unwrap();
    assert_eq!(max_abs(zero.at(2)), 0.0);
}

#[test]
fn constant_potential_gives_the_grid_norm_on_the_diagonal() {
    let f = family(4, 2, 1.0, 4);
    let c0 = 0.7;
    let v = Potential::from_spatial(&f.grid(), vec![Complex64::from(c0); f.nx()]);
    assert!(matches!(InteractionMatrixFn::new(&f, &v, Placement::Lower), Err(QError::BoundaryDominated { .. })));
    let vi = InteractionMatrixFn::with_boundary_limit(&f, &v, Placement::Lower, 1.0).unwrap();
    for p in [0, 9, 33] {
        let norm: f64 = (0..f.nx()).map(|x| f.mu[x] * f.spatial(WaveVariant::Lower, p, x).norm_sqr()).sum();
        for k in [0, 2, 4] {
            let e = vi.entry(p, p, k).unwrap();
            assert!((e - c0 * norm).norm() < 1e-10 * norm, "p={p} k={k}: {e}");
        }
    }
}

#[test]
fn evolution_over_an_empty_window_is_the_identity() {
    let time = TimeAxis::new(0.0, 1.0, 8).unwrap();
    let vi = matrix_path(&time, 4);
    for variant in EvolutionVariant::ALL {
        for k in [0, 5, 8] {
            for form in [DysonForm::Nested, DysonForm::TimeOrdered] {
                let u = dyson_u(&vi, variant, 3, k, k, form).unwrap();
                assert_eq!(u.total(), DMatrix::identity(4, 4));
            }
        }
        let u0 = dyson_u(&vi, variant, 0, 0, 8, DysonForm::Nested).unwrap();
        assert_eq!(u0.total(), DMatrix::identity(4, 4));
    }
}

#[test]
fn scalar_interaction_gives_the_exponential_series() {
    let time = TimeAxis::new(0.5, 2.0, 10).unwrap();
    let v = 0.8;
    let mats = vec![DMatrix::identity(3, 3) * Complex64::from(v); time.n];
    let vi = InteractionMatrixFn::from_matrices(time.clone(), mats).unwrap();
    let (k0, k1) = (2, 9);
    let span = time.t(k1) - time.t(k0);
    for variant in EvolutionVariant::ALL {
        let u = dyson_u(&vi, variant, 4, k0, k1, DysonForm::Nested).unwrap();
        for n in 0..=4 {
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            let want = (variant.unit() * v * span).powu(n as u32) / fact;
            let got = u.terms[n][(1, 1)];
            assert!((got - want).norm() < 1e-13, "{variant:?} n={n}: {got} vs {want}");
            assert!(u.terms[n][(0, 1)].norm() == 0.0);
        }
    }
}

#[test]
fn nested_and_time_ordered_forms_agree() {
    let time = TimeAxis::new(0.0, 1.5, 10).unwrap();
    let vi = matrix_path(&time, 4);
    let a = vi.at(2);
    let b = vi.at(7);
    assert!(max_abs(&(a * b - b * a)) > 1e-3);
    for variant in EvolutionVariant::ALL {
        for (k0, k1) in [(0, 10), (3, 8)] {
            let n = dyson_u(&vi, variant, 3, k0, k1, DysonForm::Nested).unwrap();
            let t = dyson_u(&vi, variant, 3, k0, k1, DysonForm::TimeOrdered).unwrap();
            for k in 0..=3 {
                assert!(max_abs(&(&n.terms[k] - &t.terms[k])) < 1e-8, "{variant:?} order {k}");
            }
            assert!(max_abs(&n.terms[3]) > 1e-4);
        }
    }
}

#[test]
fn first_order_term_is_antihermitian() {
    let time = TimeAxis::new(0.0, 1.0, 8).unwrap();
    let vi = matrix_path(&time, 5);
    for variant in EvolutionVariant::ALL {
        let u = dyson_u(&vi, variant, 1, 0, 8, DysonForm::Nested).unwrap();
        assert!(max_abs(&(&u.terms[1] + u.terms[1].adjoint())) < 1e-14);
    }
}

#[test]
fn left_and_right_variants_order_factors_oppositely() {
    let time = TimeAxis::new(0.0, 1.0, 6).unwrap();
    let vi = matrix_path(&time, 3);
    let r = dyson_u(&vi, EvolutionVariant::UR, 2, 0, 6, DysonForm::Nested).unwrap();
    let l = dyson_u(&vi, EvolutionVariant::UL, 2, 0, 6, DysonForm::Nested).unwrap();
    // U_L reverses the products and conjugates the unit: its terms are the adjoints of U_R's for hermitian V_I
    for n in 0..=2 {
        assert!(max_abs(&(&l.terms[n] - r.terms[n].adjoint())) < 1e-13, "order {n}");
    }
}

#[test]
fn coefficient_evolution_matches_the_operator() {
    let time = TimeAxis::new(0.0, 1.2, 9).unwrap();
    let vi = matrix_path(&time, 4);
    let c0 = coeffs(4);
    for variant in EvolutionVariant::ALL {
        for order in 0..=3 {
            let u = dyson_u(&vi, variant, order, 1, 8, DysonForm::Nested).unwrap();
            let want = u.total() * nalgebra::DVector::from_column_slice(&c0);
            let got = coefficient_evolution(&vi, variant, &c0, order, 1, 8).unwrap();
            let d = got.iter().zip(want.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(d < 1e-10, "{variant:?} order {order}: {d:e}");
        }
    }
    let zero = InteractionMatrixFn::from_matrices(time.clone(), vec![DMatrix::zeros(4, 4); time.n]).unwrap();
    assert_eq!(coefficient_evolution(&zero, EvolutionVariant::UR, &c0, 2, 0, 9).unwrap(), c0);
}

#[test]
fn probability_drift_counts_orders() {
    let time = TimeAxis::new(0.0, 1.2, 12).unwrap();
    let c0 = coeffs(4);
    let p0: f64 = c0.iter().map(|c| c.norm_sqr()).sum();
    let drift = |eps: f64, order: usize| {
        let base = matrix_path(&time, 4);
        let mats = base.normalized.iter().map(|m| m * Complex64::from(eps)).collect();
        let vi = InteractionMatrixFn::from_matrices(time.clone(), mats).unwrap();
        let c = coefficient_evolution(&vi, EvolutionVariant::UR, &c0, order, 0, 12).unwrap();
        (c.iter().map(|z| z.norm_sqr()).sum::<f64>() - p0).abs()
    };
    for order in 1..=3 {
        let want = 2f64.powi(order as i32 + 1);
        assert!(ratio_within(drift(0.02, order), drift(0.01, order), want, 0.2), "order {order}");
    }
}

#[test]
fn interaction_picture_equation_holds_to_second_order_in_dt() {
    for variant in [EvolutionVariant::UR, EvolutionVariant::UL] {
        for n in 1..=2 {
            let res: Vec<f64> = [16, 32]
                .iter()
                .map(|&s| {
                    let time = TimeAxis::new(0.0, 1.0, s).unwrap();
                    let vi = matrix_path(&time, 4);
                    interaction_residual(&vi, variant, n, s / 2).unwrap()
                })
                .collect();
            assert!(res[1] < 1e-2, "{variant:?} n={n} {res:?}");
            assert!(ratio_within(res[0], res[1], 4.0, 0.25), "{variant:?} n={n} {res:?}");
        }
    }
}

#[test]
fn evolution_rejects_mismatched_placements() {
    let f = family(4, 1, 1.0, 4);
    let vi = InteractionMatrixFn::new(&f, &gaussian(&f, 1.0, 0.35), Placement::Upper).unwrap();
    assert!(matches!(dyson_u(&vi, EvolutionVariant::UR, 1, 0, 4, DysonForm::Nested), Err(QError::VariantMismatch(_))));
    assert!(dyson_u(&vi, EvolutionVariant::UL, 1, 0, 4, DysonForm::Nested).is_ok());
    assert!(dyson_u(&vi, EvolutionVariant::UL, 1, 3, 9, DysonForm::Nested).is_err());
}

#[test]
fn dyson_smatrix_matches_the_scattering_module() {
    let f = family(4, 2, 1.0, 12);
    let v = gaussian(&f, 300.0, 0.35);
    for variant in [SVariant::SR, SVariant::SL, SVariant::SStarR, SVariant::SStarL] {
        for sense in [TimeSense::Retarded, TimeSense::Advanced] {
            let a = smatrix_from_u(&f, &v, 2, sense, variant).unwrap();
            let b = smatrix(&f, &v, 2, sense, variant, None).unwrap();
            assert!(max_abs(&b.terms[1]) > 1e-4);
            for n in 0..=2 {
                let d = max_abs(&(&a.terms[n] - &b.terms[n]));
                assert!(d < 1e-8, "{variant:?} {sense:?} order {n}: {d:e}");
            }
        }
    }
    let zero = smatrix_from_u(&f, &Potential::zero(&f.grid()), 2, TimeSense::Retarded, SVariant::SR).unwrap();
    assert_eq!(zero.total(), DMatrix::identity(f.np(), f.np()));
    assert!(matches!(smatrix_from_u(&f, &v, 3, TimeSense::Retarded, SVariant::SR), Err(QError::UnsupportedOrder(3))));
    let short = family(4, 2, 1.0, 1);
    let vs = gaussian(&short, 1.0, 0.35);
    assert!(matches!(smatrix_from_u(&short, &vs, 1, TimeSense::Retarded, SVariant::SR), Err(QError::WindowTooSmall(_))));
}

#[test]
fn doubling_the_window_leaves_the_smatrix_unchanged() {
    let pulse = |t: f64| if (0.0..=1.0).contains(&t) { (std::f64::consts::PI * t).sin().powi(2) } else { 0.0 };
    let f = family(4, 2, 1.0, 8);
    let v = gaussian(&f, 300.0, 0.35);
    let a = smatrix_from_u(&f, &v.on_grid(&f.grid(), pulse).unwrap(), 2, TimeSense::Retarded, SVariant::SR).unwrap();
    let g = std::sync::Arc::new(f.with_time(&TimeAxis::new(-0.5, 1.5, 16).unwrap()));
    let b = smatrix_from_u(&g, &v.on_grid(&g.grid(), pulse).unwrap(), 2, TimeSense::Retarded, SVariant::SR).unwrap();
    assert!(max_abs(&a.terms[1]) > 1e-4);
    for n in 1..=2 {
        assert!(max_abs(&(&a.terms[n] - &b.terms[n])) < 1e-6, "order {n}");
    }
}

#[test]
fn interaction_and_schrodinger_pictures_agree() {
    let diff = |slices: usize, order: usize| {
        let f = family(4, 2, 1.0, slices);
        let v = gaussian(&f, 300.0, 0.35);
        let c = coeffs(f.np());
        let phi = f.packet(Theory::Schrodinger, WaveVariant::Lower, &c).unwrap();
        let born = born_wavefunction(&f, &phi, &v, order, TimeSense::Retarded, BornVariant::PsiR).unwrap();
        let k = 3 * slices / 4;
        let proj = f.project_slice(WaveVariant::DualLower, born.terms[order].slice(k));
        let t = f.time.t(k);
        // undo the free phase and normalize
        let got: Vec<Complex64> = (0..f.np())
            .map(|p| proj[p] * phase_factor(f.points[p].eps, t, 1.0) * f.nu[p].sqrt())
            .collect();
        let vi = InteractionMatrixFn::new(&f, &v, Placement::Lower).unwrap();
        let u = dyson_u(&vi, EvolutionVariant::UR, order, 0, k, DysonForm::Nested).unwrap();
        let c_n: Vec<Complex64> = (0..f.np()).map(|p| c[p] * f.nu[p].sqrt()).collect();
        let want = &u.terms[order] * nalgebra::DVector::from_column_slice(&c_n);
        let scale = want.iter().map(|z| z.norm()).fold(0.0, f64::max);
        got.iter().zip(want.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale
    };
    assert!(diff(8, 1) < 1e-10);
    let (coarse, fine) = (diff(8, 2), diff(16, 2));
    assert!(fine < 1e-2, "{fine:e}");
    assert!(ratio_within(coarse, fine, 4.0, 0.3), "{coarse:e} {fine:e}");
}
