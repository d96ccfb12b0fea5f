mod common;

use common::*;
use num_complex::Complex64;
use qspace::waves::*;
use qspace::QError;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn plane_waves_solve_the_free_equation() {
    let m = rat(3, 2);
    for v in WaveVariant::ALL {
        let w = symbolic_wave(v, &m, 5, 3).unwrap();
        let r = wave_residual(&w, &m).unwrap();
        assert_eq!(r.max_space_degree, Some(3));
        assert_eq!(r.max_time_degree, Some(2));
        assert!(r.vanishes(), "{v:?}: {} / {}", r.time, r.momentum);
    }
}

#[test]
fn klein_gordon_waves_solve_their_equation() {
    let kg = kg_symbolic(&rat(1, 1), &rat(2, 1), 5, 4).unwrap();
    let (even, odd) = kg_residual(&kg).unwrap();
    assert!(even.is_zero(), "{even}");
    assert!(odd.is_zero(), "{odd}");
    assert!(!kg.odd.is_zero());
}

#[test]
fn conjugation_pairs_lower_and_upper_waves() {
    let m = rat(2, 1);
    for (a, b) in [(WaveVariant::Lower, WaveVariant::Upper), (WaveVariant::DualLower, WaveVariant::DualUpper)] {
        let wa = symbolic_wave(a, &m, 4, 2).unwrap().series;
        let wb = symbolic_wave(b, &m, 4, 2).unwrap().series;
        // the scalar is conjugated once, on the position factor
        let conj = wa
            .map_first(wa.first, |f| Ok(f.conjugate()))
            .unwrap()
            .map_second(wa.second, |g| Ok(g.conjugate().map_terms(|m, c| Some((*m, c.conj())))))
            .unwrap();
        assert_eq!(conj.first, wb.first);
        assert_eq!(conj.second, wb.second);
        assert_eq!(conj, wb, "{a:?}");
    }
}

#[test]
fn symbolic_phase_matches_the_numeric_energy_to_first_order() {
    let f = family(4, 2, 1.0, 4);
    let mass = rat(1, 1);
    let t = rat(1, 20);
    for p in [0, 7, 21, 40] {
        let pt = &f.points[p];
        let s = phase_series_at(-1, &t, &mass, 1).unwrap();
        let got = eval_momentum(&s, pt.p, &rat(3, 2)).unwrap();
        let want = Complex64::new(1.0, -pt.eps * 0.05);
        assert!((got - want).norm() < 1e-12, "p={p}: {got} vs {want}");
    }
}

#[test]
fn energy_powers_match_direct_evaluation() {
    let ph = Physics::new(1.0, 1.0).unwrap();
    let p2 = 0.1;
    let series = energy_power(p2, -0.5, &ph, 12).unwrap();
    let direct = energy_power_direct(p2, -0.5, &ph).unwrap();
    assert!(((series - direct) / direct).abs() < 1e-8);
    let ph2 = Physics::new(2.0, 3.0).unwrap();
    let e2 = energy_power(0.7, 2.0, &ph2, 1).unwrap();
    assert!((e2 - 9.0 * (0.7 + 36.0)).abs() < 1e-12);
    assert_eq!(energy_power(0.7, 0.0, &ph2, 4).unwrap(), 1.0);
    assert!(matches!(energy_power(1.2, -0.5, &ph, 8), Err(QError::SeriesDivergent(_))));
    assert!(energy_power_direct(-2.0, 1.0, &ph).is_err());
    let sym = energy_power_symbolic(1, &rat(2, 1), &rat(3, 1));
    let at = eval_momentum(&sym, [0.0, 0.5, 0.0], &rat(3, 2)).unwrap();
    let p2 = 0.25 / (2.25);
    assert!((at.re - 9.0 * (p2 + 36.0)).abs() < 1e-10, "{at}");
}

#[test]
fn plane_waves_are_orthonormal_on_the_grid() {
    let f = family(5, 2, 1.0, 4);
    for t in [0.0, 0.37, 1.9] {
        for (l, r) in [(WaveVariant::DualLower, WaveVariant::Lower), (WaveVariant::Upper, WaveVariant::DualUpper)] {
            let d = f.orthonormality_defect(Theory::Schrodinger, l, r, t).unwrap();
            assert!(d < 1e-12, "{l:?} t={t}: {d:e}");
        }
    }
    let kg = family_with(4, 2, 1.0, 4, Physics::new(1.0, 5.0).unwrap());
    assert!(kg.orthonormality_defect(Theory::KleinGordon, WaveVariant::DualLower, WaveVariant::Lower, 0.4).unwrap() < 1e-12);
    for t in [0.0, 0.6] {
        assert!(kg.kg_orthogonality_defect(t).unwrap() < 1e-12);
    }
}

#[test]
fn momenta_and_energies_respect_conjugation() {
    let f = family(4, 2, 1.0, 4);
    for p in 0..f.np() {
        let s = f.sigma_p(p);
        assert_eq!(f.sigma_p(s), p);
        assert!((f.points[p].eps - f.points[s].eps).abs() < 1e-12);
        assert!((f.nu[p] - f.nu[s]).abs() < 1e-12 * f.nu[p]);
    }
}

#[test]
fn kernels_pair_under_conjugation() {
    let f = family(4, 1, 1.0, 4);
    let pairs = [(KernelKind::KR, KernelKind::KL), (KernelKind::KStarR, KernelKind::KStarL)];
    let sx = |x: usize| f.space.sigma(x);
    for (a, b) in pairs {
        for sense in [TimeSense::Retarded, TimeSense::Advanced] {
            let ka = PropagatorKernel::new(a, sense, f.clone()).unwrap();
            let kb = PropagatorKernel::new(b, sense, f.clone()).unwrap();
            let mut worst: f64 = 0.0;
            for &(x, xp) in &[(5, 77), (130, 9), (64, 64), (200, 150)] {
                for (t, tp) in [(0.2, 0.7), (0.7, 0.2), (0.4, 0.4)] {
                    let lhs = ka.value(sx(xp), tp, sx(x), t).unwrap().conj();
                    let rhs = kb.value(x, t, xp, tp).unwrap();
                    worst = worst.max((lhs - rhs).norm());
                }
            }
            assert!(worst < 1e-12, "{a:?} {sense:?}: {worst:e}");
        }
    }
}

#[test]
fn retarded_kernels_vanish_before_the_source() {
    let f = family(4, 1, 1.0, 4);
    let k = PropagatorKernel::new(KernelKind::KR, TimeSense::Retarded, f.clone()).unwrap();
    for x in [0, 17, 100] {
        assert_eq!(k.value(x, 0.2, 33, 0.5).unwrap(), c(0.0));
        assert_ne!(k.value(x, 0.5, 33, 0.2).unwrap(), c(0.0));
    }
    let a = PropagatorKernel::new(KernelKind::KR, TimeSense::Advanced, f.clone()).unwrap();
    assert_eq!(a.value(17, 0.5, 33, 0.2).unwrap(), c(0.0));
    assert!(PropagatorKernel::new(KernelKind::DeltaR, TimeSense::Retarded, f.clone()).is_err());
    assert!(PropagatorKernel::new(KernelKind::KR, TimeSense::KgMixed, f.clone()).is_err());
    for k in KernelKind::ALL {
        assert_eq!(KernelKind::parse(k.name()).unwrap(), k);
    }
}

#[test]
fn kernels_propagate_packets_and_return_them() {
    let f = family(4, 2, 1.0, 4);
    let coeffs = coeffs(f.np());
    let packet = f.packet(Theory::Schrodinger, WaveVariant::Lower, &coeffs).unwrap();
    let (k0, k1) = (0, f.time.n - 1);
    let (t0, t1) = (f.time.t(k0), f.time.t(k1));
    let fwd = PropagatorKernel::new(KernelKind::KR, TimeSense::Retarded, f.clone()).unwrap();
    let back = PropagatorKernel::new(KernelKind::KR, TimeSense::Advanced, f.clone()).unwrap();
    let later = fwd.propagate(packet.slice(k0), t0, t1).unwrap();
    let scale = packet.slice(k1).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let d = later.iter().zip(packet.slice(k1)).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(d < 1e-10 * scale, "{d:e}");
    let again = back.propagate(&later, t1, t0).unwrap();
    let d = again.iter().zip(packet.slice(k0)).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(d < 1e-10 * scale, "{d:e}");
    assert!(fwd.propagate(packet.slice(k1), t1, t0).unwrap().iter().all(|z| z.norm() == 0.0));
}

#[test]
fn kernels_compose_through_an_intermediate_slice() {
    let f = family(4, 1, 1.0, 4);
    let k = PropagatorKernel::new(KernelKind::KR, TimeSense::Retarded, f.clone()).unwrap();
    let (xa, xb) = (f.space.flat([2, 3, 5]), f.space.flat([4, 4, 1]));
    let (ta, tc, tb) = (0.9, 0.45, 0.1);
    let mut via = Complex64::new(0.0, 0.0);
    for xc in 0..f.nx() {
        via += f.mu[xc] * k.value(xa, ta, xc, tc).unwrap() * k.value(xc, tc, xb, tb).unwrap();
    }
    let direct = k.value(xa, ta, xb, tb).unwrap();
    assert!((via - direct).norm() < 1e-10 * direct.norm(), "{via} vs {direct}");
}

#[test]
fn equal_time_kernel_is_the_grid_completeness_kernel() {
    let f = family(4, 2, 1.0, 4);
    let k = PropagatorKernel::new(KernelKind::KR, TimeSense::Retarded, f.clone()).unwrap();
    let wave = f.wave_field(Theory::Schrodinger, WaveVariant::Lower, 11).unwrap();
    let out = k.propagate(wave.slice(2), 0.5, 0.5).unwrap();
    let d = out.iter().zip(wave.slice(2)).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(d < 1e-10, "{d:e}");
}

#[test]
fn klein_gordon_kernel_combines_both_branches() {
    let f = family_with(4, 1, 1.0, 4, Physics::new(1.0, 3.0).unwrap());
    let k = PropagatorKernel::new(KernelKind::DeltaR, TimeSense::KgMixed, f.clone()).unwrap();
    assert_eq!(k.branches().len(), 2);
    let (x, y) = (17, 90);
    let sum = |ta: f64, tb: f64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..f.np() {
            let e = f.frequency(Theory::KleinGordon, p).unwrap();
            let amp2 = f.amplitude(Theory::KleinGordon, p).unwrap().powi(2);
            let u = f.spatial(WaveVariant::Lower, p, x) * f.spatial(WaveVariant::DualLower, p, y);
            acc += f.nu[p] * amp2 * u * phase_factor(e, (ta - tb).abs(), -1.0);
        }
        acc
    };
    for (ta, tb) in [(0.8, 0.3), (0.3, 0.8)] {
        let got = k.value(x, ta, y, tb).unwrap();
        let want = sum(ta, tb);
        assert!((got - want).norm() < 1e-12 * want.norm(), "{ta} {tb}");
    }
}

#[test]
fn kernel_export_carries_axes_and_values() {
    let f = family(2, 1, 1.0, 2);
    let k = PropagatorKernel::new(KernelKind::KL, TimeSense::Advanced, f.clone()).unwrap();
    let j = k.to_json().unwrap();
    assert_eq!(j["schema"], "qspace-kernel/1");
    assert_eq!(j["kind"], "K_L");
    let n = f.nx() * f.time.n;
    let vals = j["values"].as_array().unwrap();
    assert_eq!(vals.len(), n);
    let e = k.entry(3, 1, 5, 2).unwrap();
    let v = &vals[f.nx() + 3][2 * f.nx() + 5];
    assert_eq!((v[0].as_f64().unwrap(), v[1].as_f64().unwrap()), (e.re, e.im));
    assert_eq!(j.to_string(), k.to_json().unwrap().to_string());
    let big = family(6, 1, 1.0, 8);
    let kb = PropagatorKernel::new(KernelKind::KL, TimeSense::Advanced, big).unwrap();
    assert!(kb.to_json().is_err());
}
