use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_rational::BigRational;
use qspace::algebra::parse_series;
use qspace::calculus::{partial_action, DIndex, DerivativeKind};
use qspace::dyson::{dyson_u, DysonForm, EvolutionVariant, InteractionMatrixFn, Placement};
use qspace::lattice::{SpaceGrid, TimeAxis};
use qspace::qexp::{build_exp, translate, ExpVariant, TranslationKind};
use qspace::scatter::{smatrix, Potential, Profile, SVariant};
use qspace::star::{p_squared_power, star};
use qspace::waves::{Physics, PlaneWaveFamily, TimeSense};
use std::sync::Arc;

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn family(slices: usize) -> Arc<PlaneWaveFamily> {
    let s = SpaceGrid::symmetric(rat(3, 2), rat(1, 1), -2, 1, 1).unwrap();
    let m = SpaceGrid::symmetric(rat(3, 2), rat(1, 1), 0, 1, 1).unwrap();
    let t = TimeAxis::new(0.0, 1.0, slices).unwrap();
    Arc::new(PlaneWaveFamily::new(&s, &m, &t, Physics::new(1.0, 1.0).unwrap()).unwrap())
}

fn algebra(c: &mut Criterion) {
    let f = parse_series("x+^2 x3 x- + 3/2 x3^2 - i x-^2 t").unwrap();
    let g = parse_series("x-^2 x+ + q x3 x- + x+^3").unwrap();
    c.bench_function("star degree 4 by 3", |b| b.iter(|| star(black_box(&f), black_box(&g)).unwrap()));
    c.bench_function("p squared cubed", |b| b.iter(|| p_squared_power(black_box(3))));
    let h = parse_series("x+^2 x3^2 x-^2 + x3^5").unwrap();
    c.bench_function("partial minus on degree 6", |b| {
        b.iter(|| partial_action(DerivativeKind::left(DIndex::Minus), black_box(&h)).unwrap())
    });
}

fn qexp(c: &mut Criterion) {
    let mut g = c.benchmark_group("qexp");
    g.sample_size(10);
    g.bench_function("exp to order 6", |b| b.iter(|| build_exp(ExpVariant::Exp, false, black_box(6)).unwrap()));
    let f = parse_series("x+ x3 x-").unwrap();
    g.bench_function("translate degree 3", |b| b.iter(|| translate(black_box(&f), TranslationKind::PlusBar, 3).unwrap()));
    g.finish();
}

fn scattering(c: &mut Criterion) {
    let fam = family(12);
    let v = Potential::builtin(&Profile::Gaussian { strength: 300.0, width: 0.35 }, &fam.grid()).unwrap();
    let mut g = c.benchmark_group("scattering");
    g.sample_size(10);
    g.bench_function("S_R to order 2", |b| {
        b.iter(|| smatrix(&fam, black_box(&v), 2, TimeSense::Retarded, SVariant::SR, None).unwrap())
    });
    let vi = InteractionMatrixFn::new(&fam, &v, Placement::Lower).unwrap();
    g.bench_function("nested Dyson to order 3", |b| {
        b.iter(|| dyson_u(black_box(&vi), EvolutionVariant::UR, 3, 0, 12, DysonForm::Nested).unwrap())
    });
    g.finish();
}

criterion_group!(benches, algebra, qexp, scattering);
criterion_main!(benches);
