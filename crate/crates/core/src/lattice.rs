//! Geometric q-lattices, Jackson weights and sampled fields.

use crate::error::{QError, QResult};
use crate::qcoeff::scalar::rat_to_f64;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Spatial axis label in the order (+, 3, −).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    Plus,
    Three,
    Minus,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Plus, Axis::Three, Axis::Minus];

    pub fn index(self) -> usize {
        match self {
            Axis::Plus => 0,
            Axis::Three => 1,
            Axis::Minus => 2,
        }
    }
}

/// Points ±base·q^{step·j}, j = jmin..=jmax.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisSpec {
    pub base: BigRational,
    pub step: u32,
    pub jmin: i32,
    pub jmax: i32,
}

impl AxisSpec {
    pub fn len(&self) -> usize {
        2 * (self.jmax - self.jmin + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.jmax < self.jmin
    }

    /// Signed j for a storage index; ascending coordinate order.
    pub fn sign_and_j(&self, k: usize) -> (i32, i32) {
        let n = (self.jmax - self.jmin + 1) as usize;
        if k < n {
            (-1, self.jmax - k as i32)
        } else {
            (1, self.jmin + (k - n) as i32)
        }
    }

    pub fn index_of(&self, sign: i32, j: i32) -> Option<usize> {
        if j < self.jmin || j > self.jmax {
            return None;
        }
        let n = (self.jmax - self.jmin + 1) as usize;
        Some(if sign < 0 { (self.jmax - j) as usize } else { n + (j - self.jmin) as usize })
    }
}

/// Three geometric axes with a shared q.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceGrid {
    pub q: BigRational,
    pub axes: [AxisSpec; 3],
}

impl SpaceGrid {
    /// Conjugation-symmetric grid: x⁻ and x³ at ±a q^{2j}, x⁺ at ±a q^{2j+1}.
    /// `refine = 2` halves the x³ ratio to q.
    pub fn symmetric(q: BigRational, base: BigRational, jmin: i32, jmax: i32, refine: u32) -> QResult<Self> {
        if jmin > jmax {
            return Err(QError::InvalidParameter(format!("empty exponent range {jmin}..{jmax}")));
        }
        if base <= BigRational::zero() {
            return Err(QError::InvalidParameter("lattice base must be positive".into()));
        }
        if !(refine == 1 || refine == 2) {
            return Err(QError::InvalidParameter(format!("refinement must be 1 or 2, got {refine}")));
        }
        let plus = AxisSpec { base: &base * &q, step: 2, jmin, jmax };
        let three = AxisSpec { base: base.clone(), step: 2 / refine, jmin: jmin * refine as i32, jmax: jmax * refine as i32 };
        let minus = AxisSpec { base, step: 2, jmin, jmax };
        Ok(SpaceGrid { q, axes: [plus, three, minus] })
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.axes[0].len(), self.axes[1].len(), self.axes[2].len()]
    }

    pub fn npoints(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn exact_coord(&self, axis: Axis, k: usize) -> BigRational {
        let a = &self.axes[axis.index()];
        let (s, j) = a.sign_and_j(k);
        let e = a.step as i32 * j;
        let qp = if e >= 0 {
            num_traits::pow(self.q.clone(), e as usize)
        } else {
            num_traits::pow(self.q.recip(), (-e) as usize)
        };
        let v = &a.base * qp;
        if s < 0 {
            -v
        } else {
            v
        }
    }

    pub fn coords(&self, axis: Axis) -> Vec<f64> {
        (0..self.axes[axis.index()].len()).map(|k| rat_to_f64(&self.exact_coord(axis, k))).collect()
    }

    /// Jackson weights (Q − 1)|x| with Q the axis ratio.
    pub fn weights(&self, axis: Axis) -> Vec<f64> {
        let a = &self.axes[axis.index()];
        let ratio = rat_to_f64(&num_traits::pow(self.q.clone(), a.step as usize));
        self.coords(axis).iter().map(|x| (ratio - 1.0) * x.abs()).collect()
    }

    pub fn flat(&self, i: [usize; 3]) -> usize {
        let s = self.shape();
        (i[0] * s[1] + i[1]) * s[2] + i[2]
    }

    pub fn unflat(&self, f: usize) -> [usize; 3] {
        let s = self.shape();
        [f / (s[1] * s[2]), (f / s[2]) % s[1], f % s[2]]
    }

    /// Product Jackson weight per flat point.
    pub fn point_weights(&self) -> Vec<f64> {
        let w: Vec<Vec<f64>> = Axis::ALL.iter().map(|&a| self.weights(a)).collect();
        (0..self.npoints())
            .map(|f| {
                let i = self.unflat(f);
                w[0][i[0]] * w[1][i[1]] * w[2][i[2]]
            })
            .collect()
    }

    /// Coordinates (x⁺, x³, x⁻) of a flat point.
    pub fn point(&self, f: usize) -> [f64; 3] {
        let i = self.unflat(f);
        [
            rat_to_f64(&self.exact_coord(Axis::Plus, i[0])),
            rat_to_f64(&self.exact_coord(Axis::Three, i[1])),
            rat_to_f64(&self.exact_coord(Axis::Minus, i[2])),
        ]
    }

    pub fn points(&self) -> Vec<[f64; 3]> {
        let c: Vec<Vec<f64>> = Axis::ALL.iter().map(|&a| self.coords(a)).collect();
        (0..self.npoints())
            .map(|f| {
                let i = self.unflat(f);
                [c[0][i[0]], c[1][i[1]], c[2][i[2]]]
            })
            .collect()
    }

    /// True when (x⁺, x³, x⁻) ↦ (−q x⁻, x³, −q⁻¹ x⁺) maps the grid onto itself.
    pub fn is_conjugation_symmetric(&self) -> bool {
        let p = &self.axes[0];
        let m = &self.axes[2];
        p.step == m.step && p.jmin == m.jmin && p.jmax == m.jmax && p.base == &m.base * &self.q
    }

    /// Flat index of σ(x) for the conjugation map σ.
    pub fn sigma(&self, f: usize) -> usize {
        let i = self.unflat(f);
        let n = self.axes[0].len();
        self.flat([n - 1 - i[2], i[1], n - 1 - i[0]])
    }

    /// Index shifted by `steps` lattice steps away from the origin on one axis.
    pub fn shift(&self, axis: Axis, k: usize, steps: i32) -> Option<usize> {
        let a = &self.axes[axis.index()];
        let (s, j) = a.sign_and_j(k);
        a.index_of(s, j + steps)
    }

    /// Fraction of Σ w|f| carried by the outermost shell of every axis.
    pub fn boundary_fraction(&self, values: &[Complex64], weights: &[f64]) -> f64 {
        let mut total = 0.0;
        let mut edge = 0.0;
        for f in 0..self.npoints() {
            let v = weights[f] * values[f].norm();
            total += v;
            let i = self.unflat(f);
            let outer = Axis::ALL.iter().any(|&a| {
                let ax = &self.axes[a.index()];
                let (_, j) = ax.sign_and_j(i[a.index()]);
                j == ax.jmax
            });
            if outer {
                edge += v;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            edge / total
        }
    }
}

/// Uniform time samples t0, t0+dt, …, t0+(n−1)dt.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeAxis {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

impl TimeAxis {
    pub fn new(t0: f64, t1: f64, slices: usize) -> QResult<Self> {
        if slices == 0 || t1 < t0 {
            return Err(QError::InvalidParameter(format!("bad time window [{t0}, {t1}] with {slices} slices")));
        }
        let dt = if slices > 0 { (t1 - t0) / slices as f64 } else { 0.0 };
        Ok(TimeAxis { t0, dt, n: slices + 1 })
    }

    pub fn single(t: f64) -> Self {
        TimeAxis { t0: t, dt: 0.0, n: 1 }
    }

    pub fn t(&self, k: usize) -> f64 {
        self.t0 + self.dt * k as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.t(k)).collect()
    }

    pub fn t1(&self) -> f64 {
        self.t(self.n - 1)
    }

    /// Trapezoid weights on the full window.
    pub fn trapezoid(&self) -> Vec<f64> {
        let mut w = vec![self.dt; self.n];
        if self.n == 1 {
            return vec![0.0];
        }
        w[0] = self.dt / 2.0;
        w[self.n - 1] = self.dt / 2.0;
        w
    }
}

/// Position lattice with time samples.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeGrid {
    pub space: SpaceGrid,
    pub time: TimeAxis,
}

/// Complex samples, time-major then flat spatial index.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField {
    pub grid: LatticeGrid,
    pub values: Vec<Complex64>,
}

impl LatticeField {
    pub fn zeros(grid: &LatticeGrid) -> Self {
        LatticeField { grid: grid.clone(), values: vec![Complex64::zero(); grid.space.npoints() * grid.time.n] }
    }

    pub fn from_fn(grid: &LatticeGrid, f: impl Fn([f64; 3], f64) -> Complex64) -> Self {
        let pts = grid.space.points();
        let mut values = Vec::with_capacity(pts.len() * grid.time.n);
        for k in 0..grid.time.n {
            let t = grid.time.t(k);
            for x in &pts {
                values.push(f(*x, t));
            }
        }
        LatticeField { grid: grid.clone(), values }
    }

    pub fn slice(&self, k: usize) -> &[Complex64] {
        let n = self.grid.space.npoints();
        &self.values[k * n..(k + 1) * n]
    }

    pub fn at(&self, k: usize, f: usize) -> Complex64 {
        self.values[k * self.grid.space.npoints() + f]
    }

    /// Quantum-space conjugate: conj(f(σx)).
    pub fn conjugate(&self) -> QResult<LatticeField> {
        if !self.grid.space.is_conjugation_symmetric() {
            return Err(QError::InvalidParameter("grid is not conjugation symmetric".into()));
        }
        let n = self.grid.space.npoints();
        let mut out = self.clone();
        for k in 0..self.grid.time.n {
            for f in 0..n {
                out.values[k * n + f] = self.values[k * n + self.grid.space.sigma(f)].conj();
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> LatticeField {
        LatticeField { grid: self.grid.clone(), values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn max_abs_diff(&self, o: &LatticeField) -> f64 {
        self.values.iter().zip(&o.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

pub fn q_ratio_f64(q: &BigRational, k: i64) -> f64 {
    let v = if k >= 0 { num_traits::pow(q.clone(), k as usize) } else { num_traits::pow(q.recip(), (-k) as usize) };
    rat_to_f64(&v)
}

pub fn is_one(q: &BigRational) -> bool {
    q.is_one()
}
