//! Interaction picture, Dyson series and time-dependent perturbation theory.

use crate::calculus::DEFAULT_BOUNDARY_FRACTION;
use crate::error::{QError, QResult};
use crate::lattice::TimeAxis;
use crate::scatter::{Potential, SMatrix, SVariant, MAX_S_ORDER, MIN_TIME_SLICES};
use crate::waves::{PlaneWaveFamily, Theory, TimeSense, WaveVariant};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::sync::Arc;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Index placement of the plane waves in V_{p'p}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Placement {
    /// Σ μ (u*)_{p'} V u_p
    Lower,
    /// Σ μ u^{p'} V (u*)^p
    Upper,
}

impl Placement {
    fn waves(self) -> (WaveVariant, WaveVariant) {
        match self {
            Placement::Lower => (WaveVariant::DualLower, WaveVariant::Lower),
            Placement::Upper => (WaveVariant::Upper, WaveVariant::DualUpper),
        }
    }
}

/// Interaction-picture potential sampled at the time nodes.
#[derive(Clone, Debug)]
pub struct InteractionMatrixFn {
    pub time: TimeAxis,
    pub placement: Option<Placement>,
    /// V_{p'p}(t_k) without phases or normalization; empty for supplied matrices.
    pub raw: Vec<DMatrix<Complex64>>,
    /// √ν_{p'} (V_I)_{p'p}(t_k) √ν_p
    pub normalized: Vec<DMatrix<Complex64>>,
    eps: Vec<f64>,
    nu: Vec<f64>,
}

impl InteractionMatrixFn {
    pub fn new(family: &PlaneWaveFamily, v: &Potential, placement: Placement) -> QResult<Self> {
        Self::with_boundary_limit(family, v, placement, DEFAULT_BOUNDARY_FRACTION)
    }

    pub fn with_boundary_limit(family: &PlaneWaveFamily, v: &Potential, placement: Placement, limit: f64) -> QResult<Self> {
        if v.field.grid.space != family.space || v.field.grid.time != family.time {
            return Err(QError::InvalidParameter("potential is not sampled on the plane-wave grid".into()));
        }
        for k in 0..family.time.n {
            let frac = family.space.boundary_fraction(v.field.slice(k), &family.mu);
            if frac > limit {
                return Err(QError::BoundaryDominated { fraction: frac, limit });
            }
        }
        let (lw, rw) = placement.waves();
        let nx = family.nx();
        let np = family.np();
        let left = DMatrix::from_fn(np, nx, |p, x| family.spatial(lw, p, x) * family.mu[x]);
        let right = DMatrix::from_fn(nx, np, |x, p| family.spatial(rw, p, x));
        let spatial = |vals: &[Complex64]| {
            let lv = DMatrix::from_fn(np, nx, |p, x| left[(p, x)] * vals[x]);
            lv * &right
        };
        let raw: Vec<DMatrix<Complex64>> = match &v.separable {
            Some((s, g)) => {
                let base = spatial(s);
                g.iter().map(|gk| &base * Complex64::from(*gk)).collect()
            }
            None => (0..family.time.n).map(|k| spatial(v.field.slice(k))).collect(),
        };
        let eps: Vec<f64> = family.points.iter().map(|p| p.eps).collect();
        let mut out = InteractionMatrixFn {
            time: family.time.clone(),
            placement: Some(placement),
            raw,
            normalized: vec![],
            eps,
            nu: family.nu.clone(),
        };
        out.normalized = (0..out.time.n).map(|k| out.dressed(k)).collect();
        Ok(out)
    }

    /// Supplied normalized matrices, one per time node.
    pub fn from_matrices(time: TimeAxis, mats: Vec<DMatrix<Complex64>>) -> QResult<Self> {
        if mats.len() != time.n {
            return Err(QError::InvalidParameter(format!("{} matrices for {} time nodes", mats.len(), time.n)));
        }
        let n = mats.first().map(|m| m.nrows()).unwrap_or(0);
        if mats.iter().any(|m| m.nrows() != n || m.ncols() != n) {
            return Err(QError::InvalidParameter("interaction matrices must be square and equally sized".into()));
        }
        Ok(InteractionMatrixFn { time, placement: None, raw: vec![], normalized: mats, eps: vec![], nu: vec![] })
    }

    pub fn dim(&self) -> usize {
        self.normalized.first().map(|m| m.nrows()).unwrap_or(0)
    }

    fn dressed(&self, k: usize) -> DMatrix<Complex64> {
        let t = self.time.t(k);
        let m = &self.raw[k];
        DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| {
            let ph = Complex64::new(0.0, t * (self.eps[r] - self.eps[c])).exp();
            m[(r, c)] * ph * (self.nu[r] * self.nu[c]).sqrt()
        })
    }

    /// (V_I)_{p'p}(t_k) = e^{itε_{p'}} V_{p'p}(t_k) e^{−itε_p}.
    pub fn entry(&self, pp: usize, p: usize, k: usize) -> QResult<Complex64> {
        if self.raw.is_empty() {
            return Err(QError::InvalidParameter("supplied matrices carry no unnormalized entries".into()));
        }
        let t = self.time.t(k);
        Ok(self.raw[k][(pp, p)] * Complex64::new(0.0, t * (self.eps[pp] - self.eps[p])).exp())
    }

    pub fn at(&self, k: usize) -> &DMatrix<Complex64> {
        &self.normalized[k]
    }
}

/// The four interaction-picture evolution operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EvolutionVariant {
    UR,
    UStarR,
    UL,
    UStarL,
}

impl EvolutionVariant {
    pub const ALL: [EvolutionVariant; 4] =
        [EvolutionVariant::UR, EvolutionVariant::UStarR, EvolutionVariant::UL, EvolutionVariant::UStarL];

    pub fn placement(self) -> Placement {
        match self {
            EvolutionVariant::UR | EvolutionVariant::UStarL => Placement::Lower,
            EvolutionVariant::UL | EvolutionVariant::UStarR => Placement::Upper,
        }
    }

    /// Later times stand on the left for the R variants.
    pub fn later_left(self) -> bool {
        matches!(self, EvolutionVariant::UR | EvolutionVariant::UStarR)
    }

    /// −i for the R variants, +i for the L variants.
    pub fn unit(self) -> Complex64 {
        if self.later_left() {
            -I
        } else {
            I
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EvolutionVariant::UR => "U_R",
            EvolutionVariant::UStarR => "U*_R",
            EvolutionVariant::UL => "U_L",
            EvolutionVariant::UStarL => "U*_L",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DysonForm {
    /// n-fold nested sums over ordered nodes.
    Nested,
    /// Full-cube sums of time-ordered products divided by n!.
    TimeOrdered,
}

/// U(t_{k1}, t_{k0}) split by order.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionOperator {
    pub variant: EvolutionVariant,
    pub k0: usize,
    pub k1: usize,
    pub t0: f64,
    pub t1: f64,
    pub terms: Vec<DMatrix<Complex64>>,
}

impl EvolutionOperator {
    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn truncated(&self, n: usize) -> DMatrix<Complex64> {
        let mut acc = self.terms[0].clone();
        for t in self.terms.iter().take(n + 1).skip(1) {
            acc += t;
        }
        acc
    }

    pub fn total(&self) -> DMatrix<Complex64> {
        self.truncated(self.order())
    }
}

/// Trapezoid weights of the sub-window [t_{k0}, t_{k1}], indexed from k0.
fn window_weights(time: &TimeAxis, k0: usize, k1: usize) -> Vec<f64> {
    let n = k1 - k0 + 1;
    if n == 1 {
        return vec![0.0];
    }
    let mut w = vec![time.dt; n];
    w[0] = time.dt / 2.0;
    w[n - 1] = time.dt / 2.0;
    w
}

fn check_variant(vi: &InteractionMatrixFn, variant: EvolutionVariant) -> QResult<()> {
    match vi.placement {
        Some(p) if p != variant.placement() => Err(QError::VariantMismatch(format!(
            "{} needs {:?}-index interaction matrices, got {:?}",
            variant.name(),
            variant.placement(),
            p
        ))),
        _ => Ok(()),
    }
}

pub fn dyson_u(
    vi: &InteractionMatrixFn,
    variant: EvolutionVariant,
    n_max: usize,
    k0: usize,
    k1: usize,
    form: DysonForm,
) -> QResult<EvolutionOperator> {
    check_variant(vi, variant)?;
    if k1 >= vi.time.n || k0 > k1 {
        return Err(QError::InvalidParameter(format!("window nodes {k0}..{k1} outside 0..{}", vi.time.n)));
    }
    let d = vi.dim();
    let w = window_weights(&vi.time, k0, k1);
    // X_j = unit · w_j · A(t_j) on the window
    let xs: Vec<DMatrix<Complex64>> =
        (k0..=k1).map(|k| vi.at(k) * (variant.unit() * w[k - k0])).collect();
    let mut terms = vec![DMatrix::identity(d, d)];
    if k0 == k1 {
        terms.extend((1..=n_max).map(|_| DMatrix::zeros(d, d)));
    } else {
        match form {
            DysonForm::Nested => terms.extend(nested(&xs, n_max, variant.later_left())),
            DysonForm::TimeOrdered => {
                for n in 1..=n_max {
                    terms.push(time_ordered(&xs, n, variant.later_left()));
                }
            }
        }
    }
    Ok(EvolutionOperator { variant, k0, k1, t0: vi.time.t(k0), t1: vi.time.t(k1), terms })
}

/// Σ over weakly ordered node tuples of Π X / Π(multiplicity)!, by recursion over nodes.
fn nested(xs: &[DMatrix<Complex64>], n_max: usize, later_left: bool) -> Vec<DMatrix<Complex64>> {
    let d = xs[0].nrows();
    // g[n] collects tuples over the nodes seen so far
    let mut g: Vec<DMatrix<Complex64>> = (0..=n_max).map(|n| if n == 0 { DMatrix::identity(d, d) } else { DMatrix::zeros(d, d) }).collect();
    for x in xs {
        let mut pw = vec![DMatrix::identity(d, d)];
        for m in 1..=n_max {
            pw.push(&pw[m - 1] * x / Complex64::from(m as f64));
        }
        let mut next = g.clone();
        for n in 1..=n_max {
            for m in 1..=n {
                next[n] += if later_left { &pw[m] * &g[n - m] } else { &g[n - m] * &pw[m] };
            }
        }
        g = next;
    }
    g.split_off(1)
}

/// (1/n!) Σ over window^n of the time-ordered product; ties keep their given order.
fn time_ordered(xs: &[DMatrix<Complex64>], n: usize, later_left: bool) -> DMatrix<Complex64> {
    let d = xs[0].nrows();
    let len = xs.len();
    let mut acc = DMatrix::zeros(d, d);
    let mut idx = vec![0usize; n];
    loop {
        // stable sort: later first for later-left products, earlier first otherwise
        let mut ord = idx.clone();
        if later_left {
            ord.sort_by(|a, b| b.cmp(a));
        } else {
            ord.sort();
        }
        let mut prod = xs[ord[0]].clone();
        for &j in &ord[1..] {
            prod = &prod * &xs[j];
        }
        acc += prod;
        let mut pos = 0;
        loop {
            if pos == n {
                let fact: f64 = (1..=n).map(|k| k as f64).product();
                return acc / Complex64::from(fact);
            }
            idx[pos] += 1;
            if idx[pos] < len {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Interaction-picture amplitudes √ν c_p(t_{k1}) to the given order, from amplitudes at t_{k0}.
pub fn coefficient_evolution(
    vi: &InteractionMatrixFn,
    variant: EvolutionVariant,
    c0: &[Complex64],
    order: usize,
    k0: usize,
    k1: usize,
) -> QResult<Vec<Complex64>> {
    check_variant(vi, variant)?;
    if c0.len() != vi.dim() {
        return Err(QError::InvalidParameter(format!("expected {} amplitudes, got {}", vi.dim(), c0.len())));
    }
    if k1 >= vi.time.n || k0 > k1 {
        return Err(QError::InvalidParameter(format!("window nodes {k0}..{k1} outside 0..{}", vi.time.n)));
    }
    let w = window_weights(&vi.time, k0, k1);
    let start = DVector::from_column_slice(c0);
    let mut h: Vec<DVector<Complex64>> =
        (0..=order).map(|n| if n == 0 { start.clone() } else { DVector::zeros(c0.len()) }).collect();
    // earlier nodes act first on the vector for later-left products; otherwise the latest acts first
    let nodes: Vec<usize> = if variant.later_left() { (k0..=k1).collect() } else { (k0..=k1).rev().collect() };
    for k in nodes {
        let x = vi.at(k) * (variant.unit() * w[k - k0]);
        let mut next = h.clone();
        for n in 1..=order {
            for m in 1..=n {
                next[n] += x_pow_apply(&x, &h[n - m], m);
            }
        }
        h = next;
    }
    let mut out = h[0].clone();
    for v in &h[1..] {
        out += v;
    }
    Ok(out.iter().copied().collect())
}

/// X^m v / m!
fn x_pow_apply(x: &DMatrix<Complex64>, v: &DVector<Complex64>, m: usize) -> DVector<Complex64> {
    let mut out = v.clone();
    for j in 1..=m {
        out = x * out / Complex64::from(j as f64);
    }
    out
}

/// Central-difference residual of the interaction-picture equation at node k:
/// ‖dU_n/dt − unit·A(t_k)U_{n−1}‖ (later-left) or ‖dU_n/dt − unit·U_{n−1}A(t_k)‖, relative.
pub fn interaction_residual(
    vi: &InteractionMatrixFn,
    variant: EvolutionVariant,
    n: usize,
    k: usize,
) -> QResult<f64> {
    if n == 0 || k == 0 || k + 1 >= vi.time.n {
        return Err(QError::InvalidParameter("residual needs order ≥ 1 and an interior node".into()));
    }
    let up = dyson_u(vi, variant, n, 0, k + 1, DysonForm::Nested)?;
    let dn = dyson_u(vi, variant, n, 0, k - 1, DysonForm::Nested)?;
    let at = dyson_u(vi, variant, n, 0, k, DysonForm::Nested)?;
    let d = (&up.terms[n] - &dn.terms[n]) / Complex64::from(2.0 * vi.time.dt);
    let rhs = if variant.later_left() {
        vi.at(k) * &at.terms[n - 1] * variant.unit()
    } else {
        &at.terms[n - 1] * vi.at(k) * variant.unit()
    };
    let scale = rhs.norm();
    let r = (d - &rhs).norm();
    Ok(if scale == 0.0 { r } else { r / scale })
}

/// Evolution operator behind each S-matrix variant and sense.
pub fn evolution_for(variant: SVariant, sense: TimeSense) -> QResult<EvolutionVariant> {
    let retarded = match variant {
        SVariant::SR => EvolutionVariant::UR,
        SVariant::SStarL => EvolutionVariant::UStarL,
        SVariant::SL => EvolutionVariant::UL,
        SVariant::SStarR => EvolutionVariant::UStarR,
    };
    match sense {
        TimeSense::Retarded => Ok(retarded),
        // (S_R)^- = (S*_L)^+ and (S_L)^- = (S*_R)^+
        TimeSense::Advanced => Ok(match retarded {
            EvolutionVariant::UR => EvolutionVariant::UStarL,
            EvolutionVariant::UStarL => EvolutionVariant::UR,
            EvolutionVariant::UL => EvolutionVariant::UStarR,
            EvolutionVariant::UStarR => EvolutionVariant::UL,
        }),
        TimeSense::KgMixed => Err(QError::InvalidParameter("the interaction picture is built for the Schrödinger theory".into())),
    }
}

/// S-matrix as the evolution operator over the whole time window.
pub fn smatrix_from_u(
    family: &Arc<PlaneWaveFamily>,
    v: &Potential,
    order: usize,
    sense: TimeSense,
    variant: SVariant,
) -> QResult<SMatrix> {
    if order > MAX_S_ORDER {
        return Err(QError::UnsupportedOrder(order));
    }
    let ev = evolution_for(variant, sense)?;
    let slices = family.time.n.saturating_sub(1);
    if slices < MIN_TIME_SLICES {
        return Err(QError::WindowTooSmall(format!(
            "time window has {slices} slice(s); the S-matrix needs at least {MIN_TIME_SLICES}"
        )));
    }
    let vi = InteractionMatrixFn::new(family, v, ev.placement())?;
    let u = dyson_u(&vi, ev, order, 0, family.time.n - 1, DysonForm::Nested)?;
    Ok(SMatrix { variant, sense, theory: Theory::Schrodinger, labels: (0..family.np()).collect(), terms: u.terms })
}
