//! Born series, interacting Green's functions, S-matrices, unitarity and norm checks.

use crate::error::{QError, QResult};
use crate::lattice::{LatticeField, LatticeGrid};
use crate::waves::{
    phase_factor, theta_window_weight, KernelKind, PlaneWaveFamily, PropagatorKernel, Theory, TimeSense, WaveVariant,
    Window,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::sync::Arc;

/// Largest supported S-matrix order.
pub const MAX_S_ORDER: usize = 2;

/// Fewest time slices a convolution window needs.
pub const MIN_TIME_SLICES: usize = 2;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Builtin potential profiles, functions of r² = q⁻¹(x⁺)² + (x³)² + q(x⁻)².
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    Zero,
    /// v₀ exp(−r²/2s²)
    Gaussian { strength: f64, width: f64 },
    /// v₀ at the conjugation-fixed site with x⁺ index `plus` and x³ index `three`.
    Impulse { strength: f64, plus: usize, three: usize },
    /// v₀ (1 − r²/R²)² for r < R.
    RadialPoly { strength: f64, radius: f64 },
}

/// r² = q⁻¹(x⁺)² + (x³)² + q(x⁻)², invariant under the conjugation map.
pub fn radius2(x: [f64; 3], q: f64) -> f64 {
    x[0] * x[0] / q + x[1] * x[1] + q * x[2] * x[2]
}

/// A potential on the lattice, optionally separable as V(x)·g(t).
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    pub field: LatticeField,
    pub separable: Option<(Vec<Complex64>, Vec<f64>)>,
}

impl Potential {
    pub fn zero(grid: &LatticeGrid) -> Self {
        Potential::from_spatial(grid, vec![ZERO; grid.space.npoints()])
    }

    /// A static potential.
    pub fn from_spatial(grid: &LatticeGrid, spatial: Vec<Complex64>) -> Self {
        let g = vec![1.0; grid.time.n];
        let mut field = LatticeField::zeros(grid);
        let n = spatial.len();
        for k in 0..grid.time.n {
            field.values[k * n..(k + 1) * n].copy_from_slice(&spatial);
        }
        Potential { field, separable: Some((spatial, g)) }
    }

    /// A general time-dependent potential.
    pub fn from_field(field: LatticeField) -> Self {
        Potential { field, separable: None }
    }

    pub fn builtin(profile: &Profile, grid: &LatticeGrid) -> QResult<Self> {
        let q = crate::qcoeff::scalar::rat_to_f64(&grid.space.q);
        let pts = grid.space.points();
        let spatial: Vec<Complex64> = match profile {
            Profile::Zero => vec![ZERO; pts.len()],
            Profile::Gaussian { strength, width } => {
                if !(*width > 0.0) {
                    return Err(QError::InvalidParameter(format!("gaussian width must be positive, got {width}")));
                }
                pts.iter().map(|x| Complex64::from(strength * (-radius2(*x, q) / (2.0 * width * width)).exp())).collect()
            }
            Profile::Impulse { strength, plus, three } => {
                let s = grid.space.shape();
                if *plus >= s[0] || *three >= s[1] {
                    return Err(QError::InvalidParameter(format!("impulse site ({plus}, {three}) is off the grid")));
                }
                let site = grid.space.flat([*plus, *three, s[2] - 1 - plus]);
                (0..pts.len()).map(|f| Complex64::from(if f == site { *strength } else { 0.0 })).collect()
            }
            Profile::RadialPoly { strength, radius } => {
                if !(*radius > 0.0) {
                    return Err(QError::InvalidParameter(format!("cutoff radius must be positive, got {radius}")));
                }
                pts.iter()
                    .map(|x| {
                        let u = radius2(*x, q) / (radius * radius);
                        Complex64::from(if u < 1.0 { strength * (1.0 - u).powi(2) } else { 0.0 })
                    })
                    .collect()
            }
        };
        Ok(Potential::from_spatial(grid, spatial))
    }

    /// Multiply by a time profile g(t).
    pub fn modulated(&self, g: impl Fn(f64) -> f64) -> Self {
        let time = &self.field.grid.time;
        let n = self.field.grid.space.npoints();
        let mut out = self.clone();
        for k in 0..time.n {
            let gk = g(time.t(k));
            for v in &mut out.field.values[k * n..(k + 1) * n] {
                *v *= gk;
            }
        }
        if let Some((_, prof)) = &mut out.separable {
            for (k, p) in prof.iter_mut().enumerate() {
                *p *= g(time.t(k));
            }
        }
        out
    }

    pub fn scaled(&self, eps: f64) -> Self {
        let mut out = self.clone();
        out.field = self.field.scale(Complex64::from(eps));
        if let Some((s, _)) = &mut out.separable {
            for v in s.iter_mut() {
                *v *= eps;
            }
        }
        out
    }

    /// Same potential sampled on another time axis (separable potentials only).
    pub fn on_grid(&self, grid: &LatticeGrid, g: impl Fn(f64) -> f64) -> QResult<Self> {
        let Some((s, _)) = &self.separable else {
            return Err(QError::InvalidParameter("only separable potentials can be resampled".into()));
        };
        if grid.space != self.field.grid.space {
            return Err(QError::InvalidParameter("spatial grids differ".into()));
        }
        Ok(Potential::from_spatial(grid, s.clone()).modulated(g))
    }

    pub fn at(&self, k: usize, x: usize) -> Complex64 {
        self.field.at(k, x)
    }

    /// conj(V(σx)) = V(x) at every sample.
    pub fn is_real(&self) -> bool {
        match self.field.conjugate() {
            Ok(c) => {
                let scale = self.field.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
                c.max_abs_diff(&self.field) <= 1e-13 * scale.max(f64::MIN_POSITIVE)
            }
            Err(_) => false,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.field.values.iter().all(|v| *v == ZERO)
    }

    /// V·f sample by sample.
    pub fn times(&self, f: &LatticeField) -> LatticeField {
        let mut out = f.clone();
        for (o, v) in out.values.iter_mut().zip(&self.field.values) {
            *o *= v;
        }
        out
    }
}

fn add_fields(a: &LatticeField, b: &LatticeField) -> LatticeField {
    let mut out = a.clone();
    for (o, v) in out.values.iter_mut().zip(&b.values) {
        *o += v;
    }
    out
}

/// √(Σ_t w_t Σ_x μ_x |f|²) with trapezoid time weights.
pub fn spacetime_norm(f: &LatticeField) -> f64 {
    let mu = f.grid.space.point_weights();
    let w = f.grid.time.trapezoid();
    let nx = mu.len();
    let mut s = 0.0;
    for (k, wk) in w.iter().enumerate() {
        for x in 0..nx {
            s += wk * mu[x] * f.values[k * nx + x].norm_sqr();
        }
    }
    s.sqrt()
}

/// Σ_x μ_x f(x) g(x) on one slice.
pub fn pairing(f: &LatticeField, g: &LatticeField, k: usize) -> Complex64 {
    let mu = f.grid.space.point_weights();
    f.slice(k).iter().zip(g.slice(k)).zip(&mu).map(|((a, b), m)| a * b * m).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BornVariant {
    PsiR,
    PsiL,
    PsiStarR,
    PsiStarL,
}

impl BornVariant {
    pub fn kernel(self, theory: Theory) -> KernelKind {
        match (self, theory) {
            (BornVariant::PsiR, Theory::Schrodinger) => KernelKind::KR,
            (BornVariant::PsiL, Theory::Schrodinger) => KernelKind::KL,
            (BornVariant::PsiStarR, Theory::Schrodinger) => KernelKind::KStarR,
            (BornVariant::PsiStarL, Theory::Schrodinger) => KernelKind::KStarL,
            (BornVariant::PsiR, Theory::KleinGordon) => KernelKind::DeltaR,
            (BornVariant::PsiL, Theory::KleinGordon) => KernelKind::DeltaL,
            (BornVariant::PsiStarR, Theory::KleinGordon) => KernelKind::DeltaStarR,
            (BornVariant::PsiStarL, Theory::KleinGordon) => KernelKind::DeltaStarL,
        }
    }

    /// R variants convolve with the kernel on the left, L variants on the right.
    pub fn acts_left(self) -> bool {
        matches!(self, BornVariant::PsiR | BornVariant::PsiStarR)
    }

    pub fn name(self) -> &'static str {
        match self {
            BornVariant::PsiR => "psi_R",
            BornVariant::PsiL => "psi_L",
            BornVariant::PsiStarR => "psi*_R",
            BornVariant::PsiStarL => "psi*_L",
        }
    }
}

/// Theory implied by a time sense.
pub fn theory_of(sense: TimeSense) -> Theory {
    match sense {
        TimeSense::KgMixed => Theory::KleinGordon,
        _ => Theory::Schrodinger,
    }
}

/// Interaction factor of the Born series: i^{∓1} for R kinds, i^{±1} for L kinds;
/// −i and +i for the Klein-Gordon R and L kinds.
pub fn born_factor(kind: KernelKind, sense: TimeSense) -> Complex64 {
    let r = kind.first_later();
    match sense {
        TimeSense::Retarded | TimeSense::KgMixed => {
            if r {
                -I
            } else {
                I
            }
        }
        TimeSense::Advanced => {
            if r {
                I
            } else {
                -I
            }
        }
    }
}

fn check_window(family: &PlaneWaveFamily) -> QResult<()> {
    let slices = family.time.n.saturating_sub(1);
    if slices < MIN_TIME_SLICES {
        return Err(QError::WindowTooSmall(format!(
            "time window has {slices} slice(s); convolutions need at least {MIN_TIME_SLICES}"
        )));
    }
    Ok(())
}

fn check_grid(family: &PlaneWaveFamily, f: &LatticeField, what: &str) -> QResult<()> {
    if f.grid.space != family.space || f.grid.time != family.time {
        return Err(QError::InvalidParameter(format!("{what} is not sampled on the plane-wave grid")));
    }
    Ok(())
}

/// Born terms of a wavefunction: term 0 is the free solution.
#[derive(Clone, Debug)]
pub struct BornExpansion {
    pub variant: BornVariant,
    pub sense: TimeSense,
    pub kernel: PropagatorKernel,
    pub factor: Complex64,
    pub terms: Vec<LatticeField>,
}

impl BornExpansion {
    pub fn free(&self) -> &LatticeField {
        &self.terms[0]
    }

    pub fn partial_sum(&self, n: usize) -> LatticeField {
        let mut acc = self.terms[0].clone();
        for t in self.terms.iter().take(n + 1).skip(1) {
            acc = add_fields(&acc, t);
        }
        acc
    }

    /// factor · K ⊛ (V f), on the variant's side.
    pub fn step(&self, v: &Potential, f: &LatticeField) -> QResult<LatticeField> {
        let src = v.times(f);
        let c = if self.variant.acts_left() { self.kernel.apply_left(&src)? } else { self.kernel.apply_right(&src)? };
        Ok(c.scale(self.factor))
    }
}

pub fn born_wavefunction(
    family: &Arc<PlaneWaveFamily>,
    free: &LatticeField,
    v: &Potential,
    n_max: usize,
    sense: TimeSense,
    variant: BornVariant,
) -> QResult<BornExpansion> {
    check_window(family)?;
    check_grid(family, free, "free solution")?;
    check_grid(family, &v.field, "potential")?;
    let kind = variant.kernel(theory_of(sense));
    let kernel = PropagatorKernel::new(kind, sense, family.clone())?;
    let mut e = BornExpansion { variant, sense, kernel, factor: born_factor(kind, sense), terms: vec![free.clone()] };
    for n in 1..=n_max {
        let next = e.step(v, &e.terms[n - 1])?;
        e.terms.push(next);
    }
    Ok(e)
}

/// Norm of ψ_n − φ − factor·K ⊛ (V ψ_n) for the partial sum ψ_n.
pub fn ls_residual(e: &BornExpansion, v: &Potential, n: usize) -> QResult<f64> {
    if n >= e.terms.len() {
        return Err(QError::InvalidParameter(format!("expansion has {} terms, asked for order {n}", e.terms.len() - 1)));
    }
    let psi = e.partial_sum(n);
    let back = e.step(v, &psi)?;
    let mut r = psi;
    for ((o, f), b) in r.values.iter_mut().zip(&e.terms[0].values).zip(&back.values) {
        *o -= f + b;
    }
    Ok(spacetime_norm(&r))
}

/// Kernel-valued Born series G = K + factor·K V G, evaluated by columns or rows.
#[derive(Clone, Debug)]
pub struct GreenSeries {
    pub kernel: PropagatorKernel,
    pub factor: Complex64,
    pub potential: Potential,
}

pub fn born_green(family: &Arc<PlaneWaveFamily>, kind: KernelKind, sense: TimeSense, v: &Potential) -> QResult<GreenSeries> {
    check_window(family)?;
    check_grid(family, &v.field, "potential")?;
    let kernel = PropagatorKernel::new(kind, sense, family.clone())?;
    Ok(GreenSeries { kernel, factor: born_factor(kind, sense), potential: v.clone() })
}

impl GreenSeries {
    /// Term n of G(·; x_b, t_b), built as factor·K ⊛ (V · term n−1).
    pub fn column(&self, n: usize, xb: usize, kb: usize) -> QResult<LatticeField> {
        if n == 0 {
            return self.kernel.column(xb, kb, false);
        }
        let mut cur = self.kernel.column(xb, kb, true)?;
        for _ in 0..n {
            cur = self.kernel.apply_left(&self.potential.times(&cur))?.scale(self.factor);
        }
        Ok(cur)
    }

    /// Term n of G(x_a, t_a; ·), built as factor·(term n−1 · V) ⊛ K.
    pub fn row(&self, n: usize, xa: usize, ka: usize) -> QResult<LatticeField> {
        if n == 0 {
            return self.kernel.row(xa, ka, false);
        }
        let mut cur = self.kernel.row(xa, ka, true)?;
        for _ in 0..n {
            cur = self.kernel.apply_right(&self.potential.times(&cur))?.scale(self.factor);
        }
        Ok(cur)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SVariant {
    SR,
    SL,
    SStarR,
    SStarL,
}

impl SVariant {
    pub fn name(self) -> &'static str {
        match self {
            SVariant::SR => "S_R",
            SVariant::SL => "S_L",
            SVariant::SStarR => "S*_R",
            SVariant::SStarL => "S*_L",
        }
    }

    /// Row waves, column waves and the inserted kernel.
    fn parts(self, theory: Theory) -> (WaveVariant, WaveVariant, KernelKind) {
        match (self, theory) {
            (SVariant::SR, Theory::KleinGordon) => (WaveVariant::DualLower, WaveVariant::Lower, KernelKind::DeltaR),
            (SVariant::SR, _) => (WaveVariant::DualLower, WaveVariant::Lower, KernelKind::KR),
            (SVariant::SStarL, _) => (WaveVariant::DualLower, WaveVariant::Lower, KernelKind::KStarL),
            (SVariant::SL, _) => (WaveVariant::Upper, WaveVariant::DualUpper, KernelKind::KL),
            (SVariant::SStarR, _) => (WaveVariant::Upper, WaveVariant::DualUpper, KernelKind::KStarR),
        }
    }
}

/// S-matrix on a subset of the family momenta, normalized to the identity:
/// entries carry √ν_row √ν_col.
#[derive(Clone, Debug, PartialEq)]
pub struct SMatrix {
    pub variant: SVariant,
    pub sense: TimeSense,
    pub theory: Theory,
    pub labels: Vec<usize>,
    /// Order-n parts, n = 0..=order.
    pub terms: Vec<DMatrix<Complex64>>,
}

impl SMatrix {
    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    /// Sum of the parts up to order n.
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

/// Tie rule for full-window double integrals: θ(0) = ½.
pub fn theta_half(window: Window, a: usize, b: usize) -> f64 {
    let (hi, lo) = match window {
        Window::FirstLater => (a, b),
        Window::FirstEarlier => (b, a),
    };
    if hi > lo {
        1.0
    } else if hi == lo {
        0.5
    } else {
        0.0
    }
}

/// Σ_x μ L_r(x) V(x) R_c(x) over spatial factors.
fn spatial_matrix(
    f: &PlaneWaveFamily,
    left: WaveVariant,
    rows: &[usize],
    v: &[Complex64],
    right: WaveVariant,
    cols: &[usize],
) -> DMatrix<Complex64> {
    let nx = f.nx();
    let lm = DMatrix::from_fn(rows.len(), nx, |r, x| f.spatial(left, rows[r], x) * f.mu[x] * v[x]);
    let rm = DMatrix::from_fn(nx, cols.len(), |x, c| f.spatial(right, cols[c], x));
    lm * rm
}

/// Time-dressed matrix element Σ_x μ L_r(x,t) V(x,t) R_c(x,t) at every slice.
struct Dressed {
    base: Vec<DMatrix<Complex64>>,
    separable: Option<Vec<f64>>,
}

impl Dressed {
    fn new(
        f: &PlaneWaveFamily,
        v: &Potential,
        left: WaveVariant,
        rows: &[usize],
        right: WaveVariant,
        cols: &[usize],
    ) -> Self {
        match &v.separable {
            Some((s, g)) => Dressed { base: vec![spatial_matrix(f, left, rows, s, right, cols)], separable: Some(g.clone()) },
            None => {
                let base = (0..f.time.n).map(|k| spatial_matrix(f, left, rows, v.field.slice(k), right, cols)).collect();
                Dressed { base, separable: None }
            }
        }
    }

    fn at(&self, k: usize) -> (&DMatrix<Complex64>, f64) {
        match &self.separable {
            Some(g) => (&self.base[0], g[k]),
            None => (&self.base[k], 1.0),
        }
    }
}

/// amplitude · e^{i s ω t} per label.
fn dressing(f: &PlaneWaveFamily, theory: Theory, v: WaveVariant, labels: &[usize], t: f64) -> QResult<Vec<Complex64>> {
    labels
        .iter()
        .map(|&p| Ok(f.amplitude(theory, p)? * phase_factor(f.frequency(theory, p)?, t, v.time_sign())))
        .collect()
}

fn dress(m: &DMatrix<Complex64>, g: f64, left: &[Complex64], right: &[Complex64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| left[r] * m[(r, c)] * right[c] * g)
}

/// S-matrix up to the given order on a subset of momenta (all momenta if `labels` is None).
pub fn smatrix(
    family: &Arc<PlaneWaveFamily>,
    v: &Potential,
    order: usize,
    sense: TimeSense,
    variant: SVariant,
    labels: Option<&[usize]>,
) -> QResult<SMatrix> {
    if order > MAX_S_ORDER {
        return Err(QError::UnsupportedOrder(order));
    }
    let theory = theory_of(sense);
    if theory == Theory::KleinGordon && variant != SVariant::SR {
        return Err(QError::InvalidParameter("Klein-Gordon scattering supports the S_R particle channel only".into()));
    }
    check_grid(family, &v.field, "potential")?;
    let f = family.as_ref();
    let labels: Vec<usize> = labels.map(|l| l.to_vec()).unwrap_or_else(|| (0..f.np()).collect());
    if labels.iter().any(|&p| p >= f.np()) {
        return Err(QError::InvalidParameter("momentum label out of range".into()));
    }
    let n = labels.len();
    let (lv, rv, kind) = variant.parts(theory);
    let kernel = PropagatorKernel::new(kind, sense, family.clone())?;
    let factor = born_factor(kind, sense);
    let norm: Vec<f64> = labels.iter().map(|&p| f.nu[p].sqrt()).collect();
    let normalize = |m: DMatrix<Complex64>| DMatrix::from_fn(n, n, |r, c| m[(r, c)] * norm[r] * norm[c]);
    let w = f.time.trapezoid();
    let times = f.time.times();
    let nt = f.time.n;
    let mut terms = vec![DMatrix::identity(n, n)];
    if order >= 1 {
        let d = Dressed::new(f, v, lv, &labels, rv, &labels);
        let mut t1 = DMatrix::zeros(n, n);
        for k in 0..nt {
            let (m, g) = d.at(k);
            let l = dressing(f, theory, lv, &labels, times[k])?;
            let r = dressing(f, theory, rv, &labels, times[k])?;
            t1 += dress(m, g * w[k], &l, &r);
        }
        terms.push(normalize(t1) * factor);
    }
    if order >= 2 {
        let all: Vec<usize> = (0..f.np()).collect();
        let (ka, kb) = kind.factors();
        let xl = Dressed::new(f, v, lv, &labels, ka, &all);
        let xr = Dressed::new(f, v, kb, &all, rv, &labels);
        let nu_all: Vec<Complex64> = f.nu.iter().map(|&x| Complex64::from(x)).collect();
        let mut t2 = DMatrix::zeros(n, n);
        for br in kernel.branches() {
            let s = if br.reflect { -1.0 } else { 1.0 };
            let xs: Vec<DMatrix<Complex64>> = (0..nt)
                .map(|k| {
                    let (m, g) = xl.at(k);
                    let l = dressing(f, theory, lv, &labels, times[k])?;
                    let r: Vec<Complex64> =
                        dressing(f, theory, ka, &all, s * times[k])?.iter().zip(&nu_all).map(|(a, b)| a * b).collect();
                    Ok(dress(m, g, &l, &r))
                })
                .collect::<QResult<_>>()?;
            let ys: Vec<DMatrix<Complex64>> = (0..nt)
                .map(|k| {
                    let (m, g) = xr.at(k);
                    let l = dressing(f, theory, kb, &all, s * times[k])?;
                    let r = dressing(f, theory, rv, &labels, times[k])?;
                    Ok(dress(m, g, &l, &r))
                })
                .collect::<QResult<_>>()?;
            for a in 0..nt {
                if w[a] == 0.0 {
                    continue;
                }
                let mut z = DMatrix::zeros(f.np(), n);
                for b in 0..nt {
                    let wt = w[b] * theta_half(br.window, a, b);
                    if wt != 0.0 {
                        z += &ys[b] * Complex64::from(wt);
                    }
                }
                t2 += (&xs[a] * z) * Complex64::from(w[a]);
            }
        }
        terms.push(normalize(t2) * (factor * factor));
    }
    Ok(SMatrix { variant, sense, theory, labels, terms })
}

fn check_pair(l: &SMatrix, r: &SMatrix) -> QResult<()> {
    let ok = matches!((l.variant, r.variant), (SVariant::SStarL, SVariant::SR) | (SVariant::SL, SVariant::SStarR));
    if !ok {
        return Err(QError::VariantMismatch(format!(
            "{} cannot be paired with {}; use S*_L with S_R or S_L with S*_R",
            l.variant.name(),
            r.variant.name()
        )));
    }
    if l.sense != r.sense || l.theory != r.theory {
        return Err(QError::VariantMismatch("S-matrices differ in time sense or theory".into()));
    }
    if l.labels != r.labels {
        return Err(QError::VariantMismatch("S-matrices live on different momentum sets".into()));
    }
    Ok(())
}

/// Σ_{i+j ≤ order} L_i R_j − 1.
pub fn unitarity_defect_matrix(l: &SMatrix, r: &SMatrix, order: usize) -> QResult<DMatrix<Complex64>> {
    check_pair(l, r)?;
    if order > l.order().min(r.order()) {
        return Err(QError::UnsupportedOrder(order));
    }
    let n = l.labels.len();
    let mut acc = -DMatrix::<Complex64>::identity(n, n);
    for i in 0..=order {
        for j in 0..=(order - i) {
            acc += &l.terms[i] * &r.terms[j];
        }
    }
    Ok(acc)
}

/// Frobenius norm of the unitarity defect.
pub fn unitarity_defect(l: &SMatrix, r: &SMatrix, order: usize) -> QResult<f64> {
    Ok(unitarity_defect_matrix(l, r, order)?.norm())
}

/// Unitarity defect restricted to a block of labels shared by both matrices.
pub fn unitarity_defect_block(l: &SMatrix, r: &SMatrix, order: usize, block: &[usize]) -> QResult<f64> {
    let m = unitarity_defect_matrix(l, r, order)?;
    let pos: Vec<usize> = block
        .iter()
        .map(|b| l.labels.iter().position(|x| x == b))
        .collect::<Option<_>>()
        .ok_or_else(|| QError::InvalidParameter("block label outside the S-matrix labels".into()))?;
    Ok(DMatrix::from_fn(pos.len(), pos.len(), |i, j| m[(pos[i], pos[j])]).norm())
}

/// Free and scattered bilinear norms on one slice.
#[derive(Clone, Debug, PartialEq)]
pub struct NormCheck {
    pub slice: usize,
    pub free: Complex64,
    pub scattered: Complex64,
    pub deviation: f64,
}

/// ⟨φ*_L, φ_R⟩ on a slice, with φ_R = Σ ν c u_p and φ*_L = Σ ν c̄ (u*)_p.
pub fn free_norm(family: &PlaneWaveFamily, coeffs: &[Complex64], slice: usize) -> QResult<Complex64> {
    let (phi, phis) = free_pair(family, coeffs)?;
    Ok(pairing(&phis, &phi, slice))
}

fn free_pair(family: &PlaneWaveFamily, coeffs: &[Complex64]) -> QResult<(LatticeField, LatticeField)> {
    let conj: Vec<Complex64> = coeffs.iter().map(|c| c.conj()).collect();
    Ok((
        family.packet(Theory::Schrodinger, WaveVariant::Lower, coeffs)?,
        family.packet(Theory::Schrodinger, WaveVariant::DualLower, &conj)?,
    ))
}

/// |⟨(ψ*_L)^±, (ψ_R)^±⟩ − ⟨φ*_L, φ_R⟩| at the latest (retarded) or earliest (advanced) slice,
/// or at an explicit slice.
pub fn norm_preservation(
    family: &Arc<PlaneWaveFamily>,
    coeffs: &[Complex64],
    v: &Potential,
    order: usize,
    sense: TimeSense,
    slice: Option<usize>,
) -> QResult<NormCheck> {
    if sense == TimeSense::KgMixed {
        return Err(QError::InvalidParameter("norm preservation is defined for the Schrödinger theory".into()));
    }
    let (phi, phis) = free_pair(family, coeffs)?;
    let r = born_wavefunction(family, &phi, v, order, sense, BornVariant::PsiR)?;
    let l = born_wavefunction(family, &phis, v, order, sense, BornVariant::PsiStarL)?;
    let k = slice.unwrap_or(match sense {
        TimeSense::Advanced => 0,
        _ => family.time.n - 1,
    });
    let free = pairing(&phis, &phi, k);
    let scattered = pairing(&l.partial_sum(order), &r.partial_sum(order), k);
    Ok(NormCheck { slice: k, free, scattered, deviation: (scattered - free).norm() })
}

/// Normalized Gram matrix √ν√ν ⟨U*_{p'}, U_p⟩ of scattered waves on a slice, minus the identity.
pub fn scattered_gram_defect(
    family: &Arc<PlaneWaveFamily>,
    v: &Potential,
    order: usize,
    sense: TimeSense,
    labels: &[usize],
    slice: usize,
) -> QResult<DMatrix<Complex64>> {
    let f = family.as_ref();
    let mut right = Vec::with_capacity(labels.len());
    let mut left = Vec::with_capacity(labels.len());
    for &p in labels {
        let u = f.wave_field(Theory::Schrodinger, WaveVariant::Lower, p)?;
        let us = f.wave_field(Theory::Schrodinger, WaveVariant::DualLower, p)?;
        right.push(born_wavefunction(family, &u, v, order, sense, BornVariant::PsiR)?.partial_sum(order));
        left.push(born_wavefunction(family, &us, v, order, sense, BornVariant::PsiStarL)?.partial_sum(order));
    }
    let n = labels.len();
    Ok(DMatrix::from_fn(n, n, |r, c| {
        let g = pairing(&left[r], &right[c], slice) * (f.nu[labels[r]] * f.nu[labels[c]]).sqrt();
        g - if r == c { Complex64::from(1.0) } else { ZERO }
    }))
}

/// Particular solution of the inhomogeneous free equation: ∓i (or ±i) times the kernel convolution of ρ.
pub fn inhomogeneous_solve(
    family: &Arc<PlaneWaveFamily>,
    rho: &LatticeField,
    variant: BornVariant,
    sense: TimeSense,
) -> QResult<LatticeField> {
    check_window(family)?;
    check_grid(family, rho, "source")?;
    let theory = theory_of(sense);
    let kind = variant.kernel(theory);
    let kernel = PropagatorKernel::new(kind, sense, family.clone())?;
    let factor = match theory {
        Theory::Schrodinger => born_factor(kind, sense),
        Theory::KleinGordon => -born_factor(kind, sense),
    };
    let c = if variant.acts_left() { kernel.apply_left(rho)? } else { kernel.apply_right(rho)? };
    Ok(c.scale(factor))
}

/// Relative residual of the defining equation at interior slices, evaluated in the
/// plane-wave basis with central time differences:
/// Schrödinger (i(−s)∂_t − ε)c = ρ̂, Klein-Gordon (c⁻²∂_t² + p² + (mc)²)c = ρ̂.
pub fn inhomogeneous_residual(
    family: &PlaneWaveFamily,
    psi: &LatticeField,
    rho: &LatticeField,
    variant: BornVariant,
    sense: TimeSense,
) -> QResult<f64> {
    let theory = theory_of(sense);
    let (a, b) = variant.kernel(theory).factors();
    let (out, dual) = if variant.acts_left() { (a, b) } else { (b, a) };
    let nt = family.time.n;
    if nt < 3 {
        return Err(QError::WindowTooSmall("residual needs three time nodes".into()));
    }
    let dt = family.time.dt;
    let cp: Vec<Vec<Complex64>> = (0..nt).map(|k| family.project_slice(dual, psi.slice(k))).collect();
    let rp: Vec<Vec<Complex64>> = (0..nt).map(|k| family.project_slice(dual, rho.slice(k))).collect();
    let c2 = family.physics.c * family.physics.c;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for k in 1..nt - 1 {
        let mut r2 = 0.0;
        let mut s2 = 0.0;
        for p in 0..family.np() {
            let lhs = match theory {
                Theory::Schrodinger => {
                    let d = (cp[k + 1][p] - cp[k - 1][p]) / (2.0 * dt);
                    I * (-out.time_sign()) * d - family.points[p].eps * cp[k][p]
                }
                Theory::KleinGordon => {
                    let d2 = (cp[k + 1][p] - 2.0 * cp[k][p] + cp[k - 1][p]) / (dt * dt);
                    let e = family.frequency(theory, p)?;
                    d2 / c2 + e * e / c2 * cp[k][p]
                }
            };
            r2 += family.nu[p] * (lhs - rp[k][p]).norm_sqr();
            s2 += family.nu[p] * rp[k][p].norm_sqr();
        }
        worst = worst.max(r2.sqrt());
        scale = scale.max(s2.sqrt());
    }
    Ok(if scale == 0.0 { worst } else { worst / scale })
}

/// Quadrature weight the convolutions give node c against output node k.
pub fn convolution_weight(time: &crate::lattice::TimeAxis, c: usize, k: usize, below: bool) -> f64 {
    time.trapezoid()[c] * theta_window_weight(c, k, time.n, below)
}
