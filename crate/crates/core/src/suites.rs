//! Identity suites: exact and numeric checks of every module, grouped by topic.

use crate::algebra::{convert_ordering, normal_order_oracle, Gen, Mono, NCWord, NSeries, Ordering, Space};
use crate::calculus::{inverse_minus_closed_form, inverse_partial, jackson_d, jackson_d_lattice, partial_action};
use crate::calculus::{DIndex, DerivativeKind};
use crate::classical::classical_battery;
use crate::error::{QError, QResult};
use crate::lattice::{Axis, LatticeGrid};
use crate::qcoeff::{DeformationParams, QScalar};
use crate::qexp::{addition_theorem_defect, antipode_defect, build_exp, check_eigen, counit_defect};
use crate::qexp::{inverse_exp_defect, monomials_of_degree, ExpVariant, TranslationKind};
use crate::star::{p_squared, p_squared_power, star_any, star_pow};
use crate::waves::{kg_residual, kg_symbolic, symbolic_wave, wave_residual};
use crate::waves::{KernelKind, PlaneWaveFamily, PropagatorKernel, Theory, TimeSense, WaveVariant};
use crate::algebra::sample_to_lattice;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Algebra,
    Calculus,
    Qexp,
    Waves,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 5] = ["algebra", "calculus", "qexp", "waves", "all"];

    pub fn parse(s: &str) -> QResult<Suite> {
        match s {
            "algebra" => Ok(Suite::Algebra),
            "calculus" => Ok(Suite::Calculus),
            "qexp" => Ok(Suite::Qexp),
            "waves" => Ok(Suite::Waves),
            "all" => Ok(Suite::All),
            _ => Err(QError::InvalidParameter(format!("unknown suite {s:?}; expected one of {}", Suite::NAMES.join(", ")))),
        }
    }

    pub fn name(self) -> &'static str {
        Suite::NAMES[self as usize]
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Algebra, Suite::Calculus, Suite::Qexp, Suite::Waves],
            s => vec![s],
        }
    }
}

/// Inputs shared by all suites.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub params: DeformationParams,
    pub seed: u64,
    /// Random instances per randomized identity.
    pub instances: usize,
    pub mass: BigRational,
    pub light_speed: BigRational,
    /// Numeric tolerance for floating-point identities.
    pub tolerance: f64,
    /// Nearby deformation for the classical-limit battery.
    pub near_one: BigRational,
    /// Lattice family for numeric wave checks; absent in classical mode.
    pub family: Option<Arc<PlaneWaveFamily>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

/// Outcome of one identity.
#[derive(Clone, Debug)]
pub struct Identity {
    pub suite: &'static str,
    pub name: String,
    /// Topic the identity belongs to, e.g. "coordinate relations".
    pub topic: &'static str,
    pub exact: bool,
    pub status: Status,
    pub detail: String,
}

struct Recorder {
    suite: &'static str,
    out: Vec<Identity>,
}

impl Recorder {
    fn exact(&mut self, name: &str, topic: &'static str, f: impl FnOnce() -> QResult<Vec<String>>) {
        let (status, detail) = match f() {
            Ok(bad) if bad.is_empty() => (Status::Pass, "zero remainder".to_string()),
            Ok(bad) => (Status::Fail, format!("{} nonzero: {}", bad.len(), bad[0])),
            Err(e) => (Status::Fail, e.to_string()),
        };
        self.push(name, topic, true, status, detail);
    }

    fn numeric(&mut self, name: &str, topic: &'static str, tol: f64, f: impl FnOnce() -> QResult<f64>) {
        let (status, detail) = match f() {
            Ok(d) if d < tol => (Status::Pass, format!("deviation {d:.3e} < {tol:.1e}")),
            Ok(d) => (Status::Fail, format!("deviation {d:.3e} >= {tol:.1e}")),
            Err(e) => (Status::Fail, e.to_string()),
        };
        self.push(name, topic, false, status, detail);
    }

    fn skip(&mut self, name: &str, topic: &'static str, why: &str) {
        self.push(name, topic, false, Status::Skipped, why.to_string());
    }

    fn push(&mut self, name: &str, topic: &'static str, exact: bool, status: Status, detail: String) {
        self.out.push(Identity { suite: self.suite, name: name.to_string(), topic, exact, status, detail });
    }
}

/// Run a suite (or all of them) and return every identity's outcome in a fixed order.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Vec<Identity> {
    let mut out = Vec::new();
    for s in suite.members() {
        let mut r = Recorder { suite: s.name(), out: Vec::new() };
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        match s {
            Suite::Algebra => algebra(&mut r, cfg, &mut rng),
            Suite::Calculus => calculus(&mut r, cfg, &mut rng),
            Suite::Qexp => qexp(&mut r, cfg),
            Suite::Waves => waves(&mut r, cfg),
            Suite::All => unreachable!(),
        }
        out.extend(r.out);
    }
    out
}

// ---- random inputs ----

/// Random monomial of total spatial degree ≤ max_degree, with an optional time power.
pub fn random_mono(rng: &mut impl Rng, max_degree: u32, with_time: bool) -> Mono {
    let d = rng.gen_range(0..=max_degree);
    let a = rng.gen_range(0..=d);
    let b = rng.gen_range(0..=d - a);
    let t = if with_time { rng.gen_range(0..=1) } else { 0 };
    Mono::new(a, b, d - a - b, t)
}

/// Small coefficient drawn from integers, powers of q, λ and i.
pub fn random_coeff(rng: &mut impl Rng) -> QScalar {
    let n = QScalar::from_int(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
    match rng.gen_range(0..4) {
        0 => n,
        1 => n.mul_q_pow(rng.gen_range(-2..=2)),
        2 => &n * &QScalar::lambda(),
        _ => n.mul_i_pow(1),
    }
}

/// Random polynomial with up to `terms` terms of degree ≤ max_degree.
pub fn random_poly(rng: &mut impl Rng, max_degree: u32, terms: usize, with_time: bool, ordering: Ordering) -> NSeries {
    let mut f = NSeries::zero(Space::Position, ordering);
    for _ in 0..rng.gen_range(1..=terms) {
        f.add_term(random_mono(rng, max_degree, with_time), random_coeff(rng));
    }
    f
}

/// Random word in X⁺, X³, X⁻, X⁰ of length ≤ max_len.
pub fn random_word(rng: &mut impl Rng, max_len: usize) -> NCWord {
    let gens = [Gen::Plus, Gen::Three, Gen::Minus, Gen::Zero];
    let n = rng.gen_range(0..=max_len);
    NCWord::new((0..n).map(|_| gens[rng.gen_range(0..4)]).collect())
}

fn mono_series(m: Mono, ordering: Ordering) -> NSeries {
    NSeries::monomial(m, QScalar::one(), Space::Position, ordering)
}

fn var(k: usize, ordering: Ordering) -> NSeries {
    NSeries::var(k, Space::Position, ordering)
}

fn nonzero(label: String, s: &NSeries, bad: &mut Vec<String>) {
    if !s.is_zero() {
        bad.push(format!("{label}: {s}"));
    }
}

// ---- algebra and star products ----

fn algebra(r: &mut Recorder, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) {
    let orderings = [Ordering::Standard, Ordering::Reversed];
    r.exact("coordinate relations", "coordinate relations", || {
        let mut bad = Vec::new();
        for o in orderings {
            let (p, t, m) = (var(0, o), var(1, o), var(2, o));
            let s = |a: &NSeries, b: &NSeries| star_any(a, b);
            nonzero(format!("{o:?} X3 X+"), &s(&t, &p)?.sub(&s(&p, &t)?.scale(&QScalar::q_pow(2))), &mut bad);
            nonzero(format!("{o:?} X3 X-"), &s(&t, &m)?.sub(&s(&m, &t)?.scale(&QScalar::q_pow(-2))), &mut bad);
            let lhs = s(&m, &p)?.sub(&s(&p, &m)?);
            nonzero(format!("{o:?} X- X+"), &lhs.sub(&s(&t, &t)?.scale(&QScalar::lambda())), &mut bad);
        }
        Ok(bad)
    });
    r.exact("time is central", "coordinate relations", || {
        let mut bad = Vec::new();
        for o in orderings {
            let time = var(3, o);
            for k in 0..3 {
                let x = var(k, o);
                nonzero(format!("{o:?} axis {k}"), &star_any(&time, &x)?.sub(&star_any(&x, &time)?), &mut bad);
            }
        }
        Ok(bad)
    });
    let triples: Vec<[Mono; 3]> = (0..cfg.instances)
        .map(|_| [random_mono(rng, 4, true), random_mono(rng, 4, true), random_mono(rng, 4, true)])
        .collect();
    r.exact("star associativity", "star product", || {
        let mut bad = Vec::new();
        for (n, [a, b, c]) in triples.iter().enumerate() {
            let o = if n % 2 == 0 { Ordering::Standard } else { Ordering::Reversed };
            let (f, g, h) = (mono_series(*a, o), mono_series(*b, o), mono_series(*c, o));
            let left = star_any(&star_any(&f, &g)?, &h)?;
            let right = star_any(&f, &star_any(&g, &h)?)?;
            nonzero(format!("instance {n}"), &left.sub(&right), &mut bad);
        }
        Ok(bad)
    });
    r.exact("star equals normal ordering", "star product", || {
        let mut bad = Vec::new();
        for (n, [a, b, _]) in triples.iter().enumerate() {
            for o in orderings {
                let s = star_any(&mono_series(*a, o), &mono_series(*b, o))?;
                let w = NCWord::from_mono(a, o).concat(&NCWord::from_mono(b, o));
                let oracle = crate::algebra::normal_order_to(&w, o, Space::Position);
                nonzero(format!("instance {n} {o:?}"), &s.sub(&oracle), &mut bad);
            }
        }
        Ok(bad)
    });
    let words: Vec<(NCWord, NCWord)> = (0..cfg.instances).map(|_| (random_word(rng, 5), random_word(rng, 5))).collect();
    r.exact("normal ordering is multiplicative", "star product", || {
        let mut bad = Vec::new();
        for (n, (u, v)) in words.iter().enumerate() {
            let lhs = normal_order_oracle(&u.concat(v));
            let rhs = star_any(&normal_order_oracle(u), &normal_order_oracle(v))?;
            nonzero(format!("instance {n}"), &lhs.sub(&rhs), &mut bad);
        }
        Ok(bad)
    });
    r.exact("powers of p squared", "momentum powers", || {
        let mut bad = Vec::new();
        let p2 = p_squared();
        for k in 1..=3 {
            nonzero(format!("k = {k}"), &p_squared_power(k).sub(&star_pow(&p2, k)?), &mut bad);
        }
        Ok(bad)
    });
    let pairs: Vec<(NSeries, NSeries)> = (0..cfg.instances / 4)
        .map(|_| (random_poly(rng, 3, 3, true, Ordering::Standard), random_poly(rng, 3, 3, true, Ordering::Standard)))
        .collect();
    r.exact("conjugation reverses products", "conjugation", || {
        let mut bad = Vec::new();
        for (n, (f, g)) in pairs.iter().enumerate() {
            let lhs = star_any(f, g)?.conjugate();
            let rhs = star_any(&g.conjugate(), &f.conjugate())?;
            nonzero(format!("instance {n}"), &lhs.sub(&rhs), &mut bad);
        }
        Ok(bad)
    });
    r.exact("conjugation is an involution", "conjugation", || {
        let mut bad = Vec::new();
        for (n, (f, _)) in pairs.iter().enumerate() {
            nonzero(format!("instance {n}"), &f.conjugate().conjugate().sub(f), &mut bad);
        }
        Ok(bad)
    });
    r.exact("ordering conversion respects products", "orderings", || {
        let mut bad = Vec::new();
        for (n, (f, g)) in pairs.iter().enumerate() {
            let rev = |h: &NSeries| convert_ordering(h, Ordering::Reversed);
            let lhs = rev(&star_any(f, g)?);
            let rhs = star_any(&rev(f), &rev(g))?;
            nonzero(format!("instance {n}"), &lhs.sub(&rhs), &mut bad);
            nonzero(format!("round trip {n}"), &convert_ordering(&rev(f), Ordering::Standard).sub(f), &mut bad);
        }
        Ok(bad)
    });
    classical(r, cfg, "star", "classical limit of the star product");
}

fn classical(r: &mut Recorder, cfg: &SuiteConfig, prefix: &str, name: &str) {
    let checks = match classical_battery(&cfg.near_one) {
        Ok(c) => c,
        Err(e) => {
            r.push(name, "classical limit", true, Status::Fail, e.to_string());
            return;
        }
    };
    let mine: Vec<_> = checks.iter().filter(|c| c.name.starts_with(prefix)).collect();
    r.exact(&format!("{name} at q = 1"), "classical limit", || {
        Ok(mine.iter().filter(|c| !c.exact_at_one).map(|c| c.name.clone()).collect())
    });
    r.numeric(&format!("{name} near q = 1"), "classical limit", 1e-4, || {
        Ok(mine.iter().map(|c| c.near_deviation).fold(0.0, f64::max))
    });
}

// ---- calculus ----

fn calculus(r: &mut Recorder, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) {
    let polys: Vec<NSeries> = (0..cfg.instances).map(|_| random_poly(rng, 5, 3, true, Ordering::Standard)).collect();
    let d = |i: DIndex, f: &NSeries| partial_action(DerivativeKind::left(i), f);
    let (p, t, m, z) = (DIndex::Plus, DIndex::Three, DIndex::Minus, DIndex::Zero);
    r.exact("derivative algebra", "derivative relations", || {
        let mut bad = Vec::new();
        let q2 = QScalar::q_pow(2);
        for (n, f) in polys.iter().enumerate() {
            nonzero(format!("+3 #{n}"), &d(p, &d(t, f)?)?.sub(&d(t, &d(p, f)?)?.scale(&q2)), &mut bad);
            nonzero(format!("3- #{n}"), &d(t, &d(m, f)?)?.sub(&d(m, &d(t, f)?)?.scale(&q2)), &mut bad);
            let comm = d(p, &d(m, f)?)?.sub(&d(m, &d(p, f)?)?);
            nonzero(format!("+- #{n}"), &comm.sub(&d(t, &d(t, f)?)?.scale(&QScalar::lambda())), &mut bad);
        }
        Ok(bad)
    });
    r.exact("time derivative commutes", "derivative relations", || {
        let mut bad = Vec::new();
        for (n, f) in polys.iter().enumerate() {
            for i in DIndex::SPATIAL {
                nonzero(format!("{i:?} #{n}"), &d(z, &d(i, f)?)?.sub(&d(i, &d(z, f)?)?), &mut bad);
            }
        }
        Ok(bad)
    });
    r.exact("hatted derivative algebra", "derivative relations", || {
        let mut bad = Vec::new();
        let h = |i: DIndex, f: &NSeries| partial_action(DerivativeKind::hat_left(i), f);
        let qm2 = QScalar::q_pow(-2);
        for (n, f) in polys.iter().enumerate().take(cfg.instances / 4) {
            let f = convert_ordering(f, Ordering::Reversed);
            nonzero(format!("-3 #{n}"), &h(m, &h(t, &f)?)?.sub(&h(t, &h(m, &f)?)?.scale(&qm2)), &mut bad);
            nonzero(format!("3+ #{n}"), &h(t, &h(p, &f)?)?.sub(&h(p, &h(t, &f)?)?.scale(&qm2)), &mut bad);
            let comm = h(m, &h(p, &f)?)?.sub(&h(p, &h(m, &f)?)?);
            nonzero(format!("-+ #{n}"), &comm.add(&h(t, &h(t, &f)?)?.scale(&QScalar::lambda())), &mut bad);
        }
        Ok(bad)
    });
    r.exact("inverse derivatives", "inverse derivatives", || {
        let mut bad = Vec::new();
        for (n, f) in polys.iter().enumerate() {
            for i in [p, t, m, z] {
                for kind in [DerivativeKind::left(i), DerivativeKind::left(i).raised()] {
                    let back = partial_action(kind, &inverse_partial(kind, f)?)?;
                    nonzero(format!("{kind:?} #{n}"), &back.sub(f), &mut bad);
                }
                let kind = DerivativeKind::hat_left(i);
                let g = f.clone().with_ordering(Ordering::Reversed);
                nonzero(format!("{kind:?} #{n}"), &partial_action(kind, &inverse_partial(kind, &g)?)?.sub(&g), &mut bad);
            }
        }
        Ok(bad)
    });
    r.exact("inverse of the minus derivative in closed form", "inverse derivatives", || {
        let mut bad = Vec::new();
        for (n, f) in polys.iter().enumerate() {
            let a = inverse_minus_closed_form(f);
            nonzero(format!("#{n}"), &a.sub(&inverse_partial(DerivativeKind::left(m), f)?), &mut bad);
        }
        Ok(bad)
    });
    r.exact("right actions are conjugated left actions", "conjugation of derivatives", || {
        let mut bad = Vec::new();
        for (n, f) in polys.iter().enumerate() {
            for i in [p, t, m, z] {
                for (right, left) in [
                    (DerivativeKind::right(i), DerivativeKind::left(i)),
                    (DerivativeKind::hat_right(i), DerivativeKind::hat_left(i)),
                ] {
                    let g = f.clone().with_ordering(right.ordering());
                    let lhs = partial_action(right, &g)?;
                    let rhs = partial_action(left, &g.conjugate())?.conjugate().neg();
                    nonzero(format!("{i:?} {:?} #{n}", right.family), &lhs.sub(&rhs), &mut bad);
                }
            }
        }
        Ok(bad)
    });
    r.exact("right derivative algebra", "conjugation of derivatives", || {
        let mut bad = Vec::new();
        let rt = |i: DIndex, f: &NSeries| partial_action(DerivativeKind::right(i), f);
        let q2 = QScalar::q_pow(2);
        for (n, f) in polys.iter().enumerate().take(cfg.instances / 4) {
            nonzero(format!("+3 #{n}"), &rt(p, &rt(t, f)?)?.sub(&rt(t, &rt(p, f)?)?.scale(&q2)), &mut bad);
            nonzero(format!("3- #{n}"), &rt(t, &rt(m, f)?)?.sub(&rt(m, &rt(t, f)?)?.scale(&q2)), &mut bad);
            let comm = rt(p, &rt(m, f)?)?.sub(&rt(m, &rt(p, f)?)?);
            nonzero(format!("+- #{n}"), &comm.sub(&rt(t, &rt(t, f)?)?.scale(&QScalar::lambda())), &mut bad);
        }
        Ok(bad)
    });
    match &cfg.family {
        Some(fam) if !cfg.params.classical => {
            let grid = fam.grid();
            let sample: Vec<NSeries> = polys.iter().take(10).map(|f| f.filter(|m| m.get(3) == 0)).collect();
            r.numeric("lattice Jackson derivative", "Jackson derivatives", cfg.tolerance, || {
                lattice_jackson(&sample, &grid, &cfg.params)
            });
        }
        _ => r.skip("lattice Jackson derivative", "Jackson derivatives", "no deformed lattice in classical mode"),
    }
    classical(r, cfg, "derivative", "classical limit of derivatives");
    classical(r, cfg, "hat derivative", "classical limit of hatted derivatives");
}

fn lattice_jackson(polys: &[NSeries], grid: &LatticeGrid, params: &DeformationParams) -> QResult<f64> {
    let mut worst: f64 = 0.0;
    for f in polys {
        let field = sample_to_lattice(f, grid, params)?;
        for (axis, k) in [(Axis::Plus, 0), (Axis::Three, 1), (Axis::Minus, 2)] {
            for base in [2, 4] {
                let numeric = jackson_d_lattice(&field, axis, base)?;
                let exact = sample_to_lattice(&jackson_d(f, k, base), grid, params)?;
                let scale = exact.values.iter().map(|z| z.norm()).fold(1.0, f64::max);
                for (i, ok) in numeric.valid.iter().enumerate() {
                    if *ok {
                        worst = worst.max((numeric.field.values[i] - exact.values[i]).norm() / scale);
                    }
                }
            }
        }
    }
    Ok(worst)
}

// ---- q-exponentials and Hopf laws ----

fn qexp(r: &mut Recorder, cfg: &SuiteConfig) {
    let n = cfg.params.truncation_order;
    r.exact("eigenvalue equations", "q-exponentials", || {
        let mut bad = Vec::new();
        for v in ExpVariant::ALL {
            for mf in [false, true] {
                let e = build_exp(v, mf, n)?;
                for a in DIndex::SPATIAL {
                    let res = check_eigen(&e, a)?;
                    if !res.vanishes() || res.certified != n.checked_sub(1) {
                        bad.push(format!("{} momentum_first={mf} {a:?}", v.name()));
                    }
                }
            }
        }
        Ok(bad)
    });
    let kinds = [TranslationKind::Plus, TranslationKind::PlusBar];
    r.exact("addition theorems", "translations", || {
        let mut bad = Vec::new();
        for kind in kinds {
            for (m, _) in addition_theorem_defect(kind, n)? {
                bad.push(format!("{kind:?} {m:?}"));
            }
        }
        Ok(bad)
    });
    r.exact("antipode law", "translations", || {
        let mut bad = Vec::new();
        for kind in kinds {
            for d in 0..=n {
                for m in monomials_of_degree(d) {
                    let (l, rr) = antipode_defect(&mono_series(m, kind.ordering()), kind, n)?;
                    if !l.is_zero() || !rr.is_zero() {
                        bad.push(format!("{kind:?} {m:?}"));
                    }
                }
            }
        }
        Ok(bad)
    });
    r.exact("co-unit law", "translations", || {
        let mut bad = Vec::new();
        for kind in kinds {
            for d in 0..=n {
                for m in monomials_of_degree(d) {
                    let (a, b) = counit_defect(&mono_series(m, kind.ordering()), kind, n)?;
                    if !a.is_zero() || !b.is_zero() {
                        bad.push(format!("{kind:?} {m:?}"));
                    }
                }
            }
        }
        Ok(bad)
    });
    r.exact("inverse exponentials", "translations", || {
        let mut bad = Vec::new();
        for kind in kinds {
            if !inverse_exp_defect(kind, n)?.is_zero() {
                bad.push(format!("{kind:?}"));
            }
        }
        Ok(bad)
    });
    classical(r, cfg, "inversion", "classical limit of inversions");
    classical(r, cfg, "bar inversion", "classical limit of bar inversions");
}

// ---- plane waves and propagators ----

fn waves(r: &mut Recorder, cfg: &SuiteConfig) {
    let n = cfg.params.truncation_order.min(5);
    let time_order = 3;
    r.exact("free wave equations", "plane waves", || {
        let mut bad = Vec::new();
        for v in WaveVariant::ALL {
            let w = symbolic_wave(v, &cfg.mass, n, time_order)?;
            if !wave_residual(&w, &cfg.mass)?.vanishes() {
                bad.push(v.name().to_string());
            }
        }
        Ok(bad)
    });
    r.exact("Klein-Gordon wave equation", "plane waves", || {
        let kg = kg_symbolic(&cfg.mass, &cfg.light_speed, n, time_order + 1)?;
        let (even, odd) = kg_residual(&kg)?;
        Ok([("even", even), ("odd", odd)].into_iter().filter(|(_, s)| !s.is_zero()).map(|(k, _)| k.into()).collect())
    });
    r.exact("conjugation of plane waves", "plane waves", || {
        let mut bad = Vec::new();
        let pairs = [(WaveVariant::Lower, WaveVariant::Upper), (WaveVariant::DualLower, WaveVariant::DualUpper)];
        for (a, b) in pairs {
            let wa = symbolic_wave(a, &cfg.mass, n, time_order)?.series;
            let wb = symbolic_wave(b, &cfg.mass, n, time_order)?.series;
            let conj = wa
                .map_first(wa.first, |f| Ok(f.conjugate()))?
                .map_second(wa.second, |g| Ok(g.conjugate().map_terms(|m, c| Some((*m, c.conj())))))?;
            if conj != wb {
                bad.push(format!("{} vs {}", a.name(), b.name()));
            }
        }
        Ok(bad)
    });
    let Some(fam) = cfg.family.clone().filter(|_| !cfg.params.classical) else {
        for name in ["conjugation of propagators", "orthonormality on the grid"] {
            r.skip(name, "propagators", "no deformed lattice in classical mode");
        }
        return;
    };
    r.numeric("conjugation of propagators", "propagators", cfg.tolerance, || kernel_pairing(&fam));
    r.numeric("orthonormality on the grid", "plane waves", cfg.tolerance, || {
        let mut worst: f64 = 0.0;
        for t in [fam.time.t0, fam.time.t1()] {
            for (l, rr) in [(WaveVariant::DualLower, WaveVariant::Lower), (WaveVariant::Upper, WaveVariant::DualUpper)] {
                worst = worst.max(fam.orthonormality_defect(Theory::Schrodinger, l, rr, t)?);
            }
        }
        Ok(worst)
    });
}

/// max |conj K_R(σx', t'; σx, t) − K_L(x, t; x', t')| over sample points.
fn kernel_pairing(fam: &Arc<PlaneWaveFamily>) -> QResult<f64> {
    let pairs = [(KernelKind::KR, KernelKind::KL), (KernelKind::KStarR, KernelKind::KStarL)];
    let nx = fam.nx();
    let (t0, t1) = (fam.time.t0, fam.time.t1());
    let times = [(t0, t1), (t1, t0), (t0, t0), (0.5 * (t0 + t1), t1)];
    let sx = |x: usize| fam.space.sigma(x);
    let mut worst: f64 = 0.0;
    for (a, b) in pairs {
        for sense in [TimeSense::Retarded, TimeSense::Advanced] {
            let ka = PropagatorKernel::new(a, sense, fam.clone())?;
            let kb = PropagatorKernel::new(b, sense, fam.clone())?;
            for (x, xp) in [(0, nx - 1), (nx / 3, nx / 2), (nx / 2, nx / 2), (nx - 1, 1 % nx)] {
                for (t, tp) in times {
                    let lhs = ka.value(sx(xp), tp, sx(x), t)?.conj();
                    let rhs = kb.value(x, t, xp, tp)?;
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
    }
    Ok(worst)
}
