//! Free propagators as sums over the plane-wave family.

use super::symbolic::phase_factor;
use super::{PlaneWaveFamily, Theory, WaveVariant};
use crate::calculus::DEFAULT_BOUNDARY_FRACTION;
use crate::error::{QError, QResult};
use crate::lattice::LatticeField;
use num_complex::Complex64;
use serde_json::{json, Value};
use std::sync::Arc;

/// Largest number of spacetime points a dense export accepts.
pub const MAX_DENSE_POINTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// K_R(a;b) = Σ ν u_p(a) (u*)_p(b)
    KR,
    /// K_L(a;b) = Σ ν (u*)^p(a) u^p(b)
    KL,
    /// K*_R(a;b) = Σ ν (u*)^p(a) u^p(b)
    KStarR,
    /// K*_L(a;b) = Σ ν u_p(a) (u*)_p(b)
    KStarL,
    DeltaR,
    DeltaL,
    DeltaStarR,
    DeltaStarL,
}

impl KernelKind {
    pub const ALL: [KernelKind; 8] = [
        KernelKind::KR,
        KernelKind::KL,
        KernelKind::KStarR,
        KernelKind::KStarL,
        KernelKind::DeltaR,
        KernelKind::DeltaL,
        KernelKind::DeltaStarR,
        KernelKind::DeltaStarL,
    ];

    pub fn theory(self) -> Theory {
        match self {
            KernelKind::KR | KernelKind::KL | KernelKind::KStarR | KernelKind::KStarL => Theory::Schrodinger,
            _ => Theory::KleinGordon,
        }
    }

    /// Wave variants of the first and second argument.
    pub fn factors(self) -> (WaveVariant, WaveVariant) {
        match self {
            KernelKind::KR | KernelKind::KStarL | KernelKind::DeltaR | KernelKind::DeltaStarL => {
                (WaveVariant::Lower, WaveVariant::DualLower)
            }
            _ => (WaveVariant::DualUpper, WaveVariant::Upper),
        }
    }

    /// True when the retarded window is θ(t_first − t_second).
    pub fn first_later(self) -> bool {
        matches!(self, KernelKind::KR | KernelKind::KStarR | KernelKind::DeltaR | KernelKind::DeltaStarR)
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::KR => "K_R",
            KernelKind::KL => "K_L",
            KernelKind::KStarR => "K*_R",
            KernelKind::KStarL => "K*_L",
            KernelKind::DeltaR => "Delta_R",
            KernelKind::DeltaL => "Delta_L",
            KernelKind::DeltaStarR => "Delta*_R",
            KernelKind::DeltaStarL => "Delta*_L",
        }
    }

    pub fn parse(s: &str) -> QResult<KernelKind> {
        KernelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| QError::InvalidParameter(format!("unknown kernel {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TimeSense {
    Retarded,
    Advanced,
    /// Both θ-branches of a Klein-Gordon propagator.
    KgMixed,
}

impl TimeSense {
    pub fn flip(self) -> TimeSense {
        match self {
            TimeSense::Retarded => TimeSense::Advanced,
            TimeSense::Advanced => TimeSense::Retarded,
            TimeSense::KgMixed => TimeSense::KgMixed,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TimeSense::Retarded => "retarded",
            TimeSense::Advanced => "advanced",
            TimeSense::KgMixed => "kg-mixed",
        }
    }
}

/// θ(t_a − t_b) or θ(t_b − t_a) for kernel arguments (a; b).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Window {
    FirstLater,
    FirstEarlier,
}

impl Window {
    /// Step with θ(0) = 1.
    pub fn theta(self, ta: f64, tb: f64) -> f64 {
        let ok = match self {
            Window::FirstLater => ta >= tb,
            Window::FirstEarlier => tb >= ta,
        };
        if ok {
            1.0
        } else {
            0.0
        }
    }
}

/// One θ-windowed term; `reflect` evaluates both waves at −t.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Branch {
    pub window: Window,
    pub reflect: bool,
}

/// Quadrature value of θ for an integrated node c against a fixed node.
/// `below` selects θ(t_fixed − t_c), otherwise θ(t_c − t_fixed).
/// A tie inside the window counts ½; at an edge it takes the one-sided limit from inside.
pub fn theta_window_weight(c: usize, fixed: usize, n: usize, below: bool) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if c != fixed {
        return if (c < fixed) == below { 1.0 } else { 0.0 };
    }
    match (c == 0, c == n - 1) {
        (true, _) => {
            if below {
                0.0
            } else {
                1.0
            }
        }
        (_, true) => {
            if below {
                1.0
            } else {
                0.0
            }
        }
        _ => 0.5,
    }
}

/// A free propagator over a plane-wave family.
#[derive(Clone, Debug)]
pub struct PropagatorKernel {
    pub kind: KernelKind,
    pub sense: TimeSense,
    pub family: Arc<PlaneWaveFamily>,
    /// Largest accepted outer-shell share of a convolved source.
    pub boundary_limit: f64,
}

impl PropagatorKernel {
    pub fn new(kind: KernelKind, sense: TimeSense, family: Arc<PlaneWaveFamily>) -> QResult<Self> {
        let kg = kind.theory() == Theory::KleinGordon;
        if kg != (sense == TimeSense::KgMixed) {
            return Err(QError::InvalidParameter(format!("{} does not take the {} sense", kind.name(), sense.name())));
        }
        if kg {
            family.check_theory(Theory::KleinGordon)?;
        }
        Ok(PropagatorKernel { kind, sense, family, boundary_limit: DEFAULT_BOUNDARY_FRACTION })
    }

    pub fn with_boundary_limit(mut self, limit: f64) -> Self {
        self.boundary_limit = limit;
        self
    }

    pub fn branches(&self) -> Vec<Branch> {
        let later = self.kind.first_later() == (self.sense != TimeSense::Advanced);
        let (w, other) = if later {
            (Window::FirstLater, Window::FirstEarlier)
        } else {
            (Window::FirstEarlier, Window::FirstLater)
        };
        match self.kind.theory() {
            Theory::Schrodinger => vec![Branch { window: w, reflect: false }],
            Theory::KleinGordon => vec![Branch { window: w, reflect: false }, Branch { window: other, reflect: true }],
        }
    }

    fn mode_weight(&self, p: usize) -> QResult<f64> {
        let theory = self.kind.theory();
        Ok(self.family.nu[p] * self.family.amplitude(theory, p)?.powi(2))
    }

    /// K(x_a, t_a; x_b, t_b) with θ(0) = 1.
    pub fn value(&self, xa: usize, ta: f64, xb: usize, tb: f64) -> QResult<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for br in self.branches() {
            if br.window.theta(ta, tb) != 0.0 {
                acc += BranchKernel { k: self, br }.value_unwindowed(xa, ta, xb, tb)?;
            }
        }
        Ok(acc)
    }

    /// Value on grid nodes.
    pub fn entry(&self, xa: usize, ka: usize, xb: usize, kb: usize) -> QResult<Complex64> {
        let t = &self.family.time;
        self.value(xa, t.t(ka), xb, t.t(kb))
    }

    fn check_field(&self, f: &LatticeField) -> QResult<()> {
        let fam = &self.family;
        if f.grid.space != fam.space || f.grid.time != fam.time {
            return Err(QError::InvalidParameter("field grid differs from the kernel grid".into()));
        }
        let w = &fam.mu;
        for k in 0..fam.time.n {
            let frac = fam.space.boundary_fraction(f.slice(k), w);
            if frac > self.boundary_limit {
                return Err(QError::BoundaryDominated { fraction: frac, limit: self.boundary_limit });
            }
        }
        Ok(())
    }

    /// Σ_x' μ K(x, t_a; x', t_b) f(x') for a single source slice.
    pub fn propagate(&self, values: &[Complex64], tb: f64, ta: f64) -> QResult<Vec<Complex64>> {
        let f = &self.family;
        let theory = self.kind.theory();
        let (va, vb) = self.kind.factors();
        let nx = f.nx();
        let mut out = vec![Complex64::new(0.0, 0.0); nx];
        let proj = f.project_slice(vb, values);
        for br in self.branches() {
            if br.window.theta(ta, tb) == 0.0 {
                continue;
            }
            let s = if br.reflect { -1.0 } else { 1.0 };
            for p in 0..f.np() {
                let w = f.frequency(theory, p)?;
                let c = self.mode_weight(p)?
                    * phase_factor(w, s * ta, va.time_sign())
                    * phase_factor(w, s * tb, vb.time_sign())
                    * proj[p];
                for (x, o) in out.iter_mut().enumerate() {
                    *o += c * f.spatial(va, p, x);
                }
            }
        }
        Ok(out)
    }

    /// ψ(a) = Σ_b τ_b K(a; b) f(b): the kernel acts from the left.
    pub fn apply_left(&self, src: &LatticeField) -> QResult<LatticeField> {
        self.convolve(src, true)
    }

    /// ψ(b) = Σ_a τ_a f(a) K(a; b): the kernel acts from the right.
    pub fn apply_right(&self, src: &LatticeField) -> QResult<LatticeField> {
        self.convolve(src, false)
    }

    fn convolve(&self, src: &LatticeField, left: bool) -> QResult<LatticeField> {
        self.check_field(src)?;
        let f = &self.family;
        let theory = self.kind.theory();
        let (va, vb) = self.kind.factors();
        // integrated-side and output-side variants
        let (vin, vout) = if left { (vb, va) } else { (va, vb) };
        let nt = f.time.n;
        let nx = f.nx();
        let np = f.np();
        let w = f.time.trapezoid();
        let times = f.time.times();
        let proj: Vec<Vec<Complex64>> = (0..nt).map(|k| f.project_slice(vin, src.slice(k))).collect();
        let freq: Vec<f64> = (0..np).map(|p| f.frequency(theory, p)).collect::<QResult<_>>()?;
        let mw: Vec<f64> = (0..np).map(|p| self.mode_weight(p)).collect::<QResult<_>>()?;
        let mut out = LatticeField::zeros(&src.grid);
        for br in self.branches() {
            let s = if br.reflect { -1.0 } else { 1.0 };
            // θ(t_out − t_in) when the output argument is the later one.
            let out_later = (br.window == Window::FirstLater) == left;
            for k_out in 0..nt {
                let mut coef = vec![Complex64::new(0.0, 0.0); np];
                for k_in in 0..nt {
                    let tau = w[k_in] * theta_window_weight(k_in, k_out, nt, out_later);
                    if tau == 0.0 {
                        continue;
                    }
                    for p in 0..np {
                        coef[p] += tau * phase_factor(freq[p], s * times[k_in], vin.time_sign()) * proj[k_in][p];
                    }
                }
                let row = &mut out.values[k_out * nx..(k_out + 1) * nx];
                for p in 0..np {
                    let c = mw[p] * phase_factor(freq[p], s * times[k_out], vout.time_sign()) * coef[p];
                    if c == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for (x, o) in row.iter_mut().enumerate() {
                        *o += c * f.spatial(vout, p, x);
                    }
                }
            }
        }
        Ok(out)
    }

    /// K(·; x_b, t_b) on the grid. With `quadrature`, the tie slice carries the
    /// quadrature θ instead of θ(0) = 1, so the column can be integrated against.
    pub fn column(&self, xb: usize, kb: usize, quadrature: bool) -> QResult<LatticeField> {
        self.slice_field(xb, kb, quadrature, true)
    }

    /// K(x_a, t_a; ·) on the grid, with the same tie convention as `column`.
    pub fn row(&self, xa: usize, ka: usize, quadrature: bool) -> QResult<LatticeField> {
        self.slice_field(xa, ka, quadrature, false)
    }

    fn slice_field(&self, fixed_x: usize, fixed_k: usize, quadrature: bool, column: bool) -> QResult<LatticeField> {
        let f = &self.family;
        let grid = f.grid();
        let nt = f.time.n;
        let nx = f.nx();
        let times = f.time.times();
        let mut out = LatticeField::zeros(&grid);
        for br in self.branches() {
            let one = BranchKernel { k: self, br };
            for k in 0..nt {
                let (ta, tb) = if column { (times[k], times[fixed_k]) } else { (times[fixed_k], times[k]) };
                let th = if quadrature && k == fixed_k {
                    // variable node k against the fixed node: it is the later one for
                    // a column of a first-later window and for a row of a first-earlier one.
                    let var_later = (br.window == Window::FirstLater) == column;
                    theta_window_weight(k, fixed_k, nt, !var_later)
                } else {
                    br.window.theta(ta, tb)
                };
                if th == 0.0 {
                    continue;
                }
                for x in 0..nx {
                    let (xa, xb) = if column { (x, fixed_x) } else { (fixed_x, x) };
                    out.values[k * nx + x] += th * one.value_unwindowed(xa, ta, xb, tb)?;
                }
            }
        }
        Ok(out)
    }

    /// Dense values over all spacetime node pairs, row-major in (t_a, x_a; t_b, x_b).
    pub fn dense(&self) -> QResult<Vec<Complex64>> {
        let f = &self.family;
        let n = f.nx() * f.time.n;
        if n > MAX_DENSE_POINTS {
            return Err(QError::InvalidParameter(format!("{n} spacetime points exceed the dense limit {MAX_DENSE_POINTS}")));
        }
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                out.push(self.entry(a % f.nx(), a / f.nx(), b % f.nx(), b / f.nx())?);
            }
        }
        Ok(out)
    }

    /// Dense export with axis metadata.
    pub fn to_json(&self) -> QResult<Value> {
        let f = &self.family;
        let vals = self.dense()?;
        let n = f.nx() * f.time.n;
        let rows: Vec<Value> = vals
            .chunks(n)
            .map(|r| Value::Array(r.iter().map(|z| json!([z.re, z.im])).collect()))
            .collect();
        let axes: Vec<Value> = crate::lattice::Axis::ALL
            .iter()
            .map(|&a| json!({"axis": format!("{a:?}").to_lowercase(), "coords": f.space.coords(a), "weights": f.space.weights(a)}))
            .collect();
        Ok(json!({
            "schema": "qspace-kernel/1",
            "kind": self.kind.name(),
            "sense": self.sense.name(),
            "q": f.q,
            "mass": f.physics.mass,
            "c": f.physics.c,
            "momenta": f.np(),
            "space": axes,
            "times": f.time.times(),
            "index_order": "time-major, then flat (x+, x3, x-)",
            "values": rows,
        }))
    }
}

struct BranchKernel<'a> {
    k: &'a PropagatorKernel,
    br: Branch,
}

impl BranchKernel<'_> {
    fn value_unwindowed(&self, xa: usize, ta: f64, xb: usize, tb: f64) -> QResult<Complex64> {
        let f = &self.k.family;
        let theory = self.k.kind.theory();
        let (va, vb) = self.k.kind.factors();
        let s = if self.br.reflect { -1.0 } else { 1.0 };
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..f.np() {
            let w = f.frequency(theory, p)?;
            let a = f.spatial(va, p, xa) * phase_factor(w, s * ta, va.time_sign());
            let b = f.spatial(vb, p, xb) * phase_factor(w, s * tb, vb.time_sign());
            acc += self.k.mode_weight(p)? * a * b;
        }
        Ok(acc)
    }
}
