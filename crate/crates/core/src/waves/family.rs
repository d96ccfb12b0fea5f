//! Lattice plane waves: per-axis Löwdin-orthonormalized q-exponentials.

use super::symbolic::{energy_power_direct, phase_factor};
use super::{Physics, Theory, WaveVariant};
use crate::error::{QError, QResult};
use crate::lattice::{Axis, LatticeField, LatticeGrid, SpaceGrid, TimeAxis};
use crate::qcoeff::scalar::rat_to_f64;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Smallest accepted ratio of extreme singular values of a weighted axis matrix.
const MIN_SINGULAR_RATIO: f64 = 1e-13;

/// One momentum sample with its free energies.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumPoint {
    /// Upper-index coordinates (p⁺, p³, p⁻).
    pub p: [f64; 3],
    /// p² = q⁻²(p³)² − λ₊p⁺p⁻.
    pub p2: f64,
    /// p²/2m
    pub eps: f64,
    /// c√(p² + (mc)²) when real.
    pub energy: Option<f64>,
}

impl MomentumPoint {
    pub fn new(p: [f64; 3], q: f64, physics: &Physics) -> Self {
        let p2 = p[1] * p[1] / (q * q) - (q + 1.0 / q) * p[0] * p[2];
        let energy = energy_power_direct(p2, 1.0, physics).ok();
        MomentumPoint { p, p2, eps: p2 / (2.0 * physics.mass), energy }
    }
}

/// e_Q(z) = Σ zⁿ/[[n]]_Q! summed to machine convergence.
pub(crate) fn e_q(z: Complex64, big_q: f64) -> QResult<Complex64> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut qn = 1.0;
    for n in 1..4000 {
        qn *= big_q;
        let bracket = if big_q == 1.0 { n as f64 } else { (qn - 1.0) / (big_q - 1.0) };
        term = term * z / bracket;
        sum += term;
        if n > 2 && term.norm() <= 1e-17 * sum.norm() {
            return Ok(sum);
        }
        if !sum.re.is_finite() || !sum.im.is_finite() {
            break;
        }
    }
    Err(QError::SeriesDivergent(z.norm() * (1.0 - big_q).abs()))
}

/// Orthonormalize the columns of F in the weighted inner product Σ μ conj(a) b.
/// Returns ũ with Σ_i μ_i conj(ũ_ik) ũ_il = δ_kl / ν_k.
fn lowdin(f: &DMatrix<Complex64>, mu: &[f64], nu: &[f64]) -> QResult<DMatrix<Complex64>> {
    let (nx, np) = f.shape();
    let a = DMatrix::from_fn(nx, np, |i, k| f[(i, k)] * (mu[i] * nu[k]).sqrt());
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > MIN_SINGULAR_RATIO * smax) {
        return Err(QError::InvalidParameter(format!(
            "plane waves are numerically dependent on this lattice (singular ratio {:.2e})",
            smin / smax
        )));
    }
    let u = svd.u.ok_or_else(|| QError::InvalidParameter("SVD failed".into()))?;
    let vt = svd.v_t.ok_or_else(|| QError::InvalidParameter("SVD failed".into()))?;
    let o = u * vt;
    Ok(DMatrix::from_fn(nx, np, |i, k| o[(i, k)] / (mu[i] * nu[k]).sqrt()))
}

/// Axis pairing of exp(x|ip) = e_{q⁴}(−iq x⁺p⁻) e_{q²}(i x³p³) e_{q⁴}(−iq⁻¹ x⁻p⁺).
fn axis_factor(axis: usize, q: f64) -> (usize, f64, f64) {
    match axis {
        0 => (2, -q, q.powi(4)),
        1 => (1, 1.0, q * q),
        _ => (0, -1.0 / q, q.powi(4)),
    }
}

/// Plane waves on a position lattice, labelled by a momentum lattice.
#[derive(Clone, Debug)]
pub struct PlaneWaveFamily {
    pub space: SpaceGrid,
    pub momentum: SpaceGrid,
    pub time: TimeAxis,
    pub physics: Physics,
    pub q: f64,
    pub points: Vec<MomentumPoint>,
    /// Position Jackson weights.
    pub mu: Vec<f64>,
    /// Momentum Jackson weights.
    pub nu: Vec<f64>,
    /// ũ_p(x), row p.
    modes: Vec<Complex64>,
    sigma_x: Vec<usize>,
    sigma_p: Vec<usize>,
}

impl PlaneWaveFamily {
    pub fn new(space: &SpaceGrid, momentum: &SpaceGrid, time: &TimeAxis, physics: Physics) -> QResult<Self> {
        if space.q != momentum.q {
            return Err(QError::InvalidParameter("position and momentum lattices use different q".into()));
        }
        if !space.is_conjugation_symmetric() || !momentum.is_conjugation_symmetric() {
            return Err(QError::InvalidParameter("lattices must be conjugation symmetric".into()));
        }
        let q = rat_to_f64(&space.q);
        let mut axis_modes = Vec::with_capacity(3);
        for a in Axis::ALL {
            let (b, alpha, big_q) = axis_factor(a.index(), q);
            let pb = Axis::ALL[b];
            let xs = space.coords(a);
            let ps = momentum.coords(pb);
            if ps.len() > xs.len() {
                return Err(QError::InvalidParameter(format!(
                    "momentum axis {pb:?} has more points than position axis {a:?}"
                )));
            }
            let mut f = DMatrix::zeros(xs.len(), ps.len());
            for (i, x) in xs.iter().enumerate() {
                for (k, p) in ps.iter().enumerate() {
                    f[(i, k)] = e_q(Complex64::new(0.0, alpha * x * p), big_q)?;
                }
            }
            axis_modes.push(lowdin(&f, &space.weights(a), &momentum.weights(pb))?);
        }
        let nx = space.npoints();
        let np = momentum.npoints();
        let mut modes = Vec::with_capacity(nx * np);
        for p in 0..np {
            let ip = momentum.unflat(p);
            for x in 0..nx {
                let ix = space.unflat(x);
                let mut v = Complex64::new(1.0, 0.0);
                for a in 0..3 {
                    let (b, _, _) = axis_factor(a, q);
                    v *= axis_modes[a][(ix[a], ip[b])];
                }
                modes.push(v);
            }
        }
        let points = momentum.points().into_iter().map(|p| MomentumPoint::new(p, q, &physics)).collect();
        Ok(PlaneWaveFamily {
            space: space.clone(),
            momentum: momentum.clone(),
            time: time.clone(),
            physics,
            q,
            points,
            mu: space.point_weights(),
            nu: momentum.point_weights(),
            modes,
            sigma_x: (0..nx).map(|x| space.sigma(x)).collect(),
            sigma_p: (0..np).map(|p| momentum.sigma(p)).collect(),
        })
    }

    /// Same waves on another time axis.
    pub fn with_time(&self, time: &TimeAxis) -> Self {
        let mut f = self.clone();
        f.time = time.clone();
        f
    }

    pub fn grid(&self) -> LatticeGrid {
        LatticeGrid { space: self.space.clone(), time: self.time.clone() }
    }

    pub fn nx(&self) -> usize {
        self.mu.len()
    }

    pub fn np(&self) -> usize {
        self.nu.len()
    }

    pub fn sigma_p(&self, p: usize) -> usize {
        self.sigma_p[p]
    }

    /// Spatial factor of a wave.
    pub fn spatial(&self, v: WaveVariant, p: usize, x: usize) -> Complex64 {
        let nx = self.nx();
        match v {
            WaveVariant::Lower => self.modes[p * nx + x],
            WaveVariant::DualLower => self.modes[p * nx + x].conj(),
            WaveVariant::Upper => self.modes[self.sigma_p[p] * nx + self.sigma_x[x]].conj(),
            WaveVariant::DualUpper => self.modes[self.sigma_p[p] * nx + self.sigma_x[x]],
        }
    }

    /// ε_p or E_p.
    pub fn frequency(&self, theory: Theory, p: usize) -> QResult<f64> {
        match theory {
            Theory::Schrodinger => Ok(self.points[p].eps),
            Theory::KleinGordon => self.points[p].energy.ok_or_else(|| {
                QError::InvalidParameter(format!("p² + (mc)² is not positive at momentum {:?}", self.points[p].p))
            }),
        }
    }

    /// 1, or (c/√2) E^{−1/2}.
    pub fn amplitude(&self, theory: Theory, p: usize) -> QResult<f64> {
        match theory {
            Theory::Schrodinger => Ok(1.0),
            Theory::KleinGordon => Ok(self.physics.c / (2.0 * self.frequency(theory, p)?).sqrt()),
        }
    }

    pub fn check_theory(&self, theory: Theory) -> QResult<()> {
        for p in 0..self.np() {
            self.frequency(theory, p)?;
        }
        Ok(())
    }

    /// Full wave value at (x, t).
    pub fn wave(&self, theory: Theory, v: WaveVariant, p: usize, x: usize, t: f64) -> QResult<Complex64> {
        let w = self.frequency(theory, p)?;
        Ok(self.spatial(v, p, x) * self.amplitude(theory, p)? * phase_factor(w, t, v.time_sign()))
    }

    /// A wave sampled on the family grid.
    pub fn wave_field(&self, theory: Theory, v: WaveVariant, p: usize) -> QResult<LatticeField> {
        let grid = self.grid();
        let nx = self.nx();
        let mut out = LatticeField::zeros(&grid);
        for k in 0..self.time.n {
            let t = self.time.t(k);
            for x in 0..nx {
                out.values[k * nx + x] = self.wave(theory, v, p, x, t)?;
            }
        }
        Ok(out)
    }

    /// Σ_p ν_p c_p w_p(x, t).
    pub fn packet(&self, theory: Theory, v: WaveVariant, coeffs: &[Complex64]) -> QResult<LatticeField> {
        if coeffs.len() != self.np() {
            return Err(QError::InvalidParameter(format!("expected {} coefficients, got {}", self.np(), coeffs.len())));
        }
        let grid = self.grid();
        let nx = self.nx();
        let mut out = LatticeField::zeros(&grid);
        for k in 0..self.time.n {
            let t = self.time.t(k);
            for p in 0..self.np() {
                if coeffs[p] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let w = self.frequency(theory, p)?;
                let c = coeffs[p] * self.nu[p] * self.amplitude(theory, p)? * phase_factor(w, t, v.time_sign());
                for x in 0..nx {
                    out.values[k * nx + x] += c * self.spatial(v, p, x);
                }
            }
        }
        Ok(out)
    }

    /// Σ_x μ_x w_p(x) f(x) for the spatial factors of one variant.
    pub fn project_slice(&self, v: WaveVariant, values: &[Complex64]) -> Vec<Complex64> {
        let nx = self.nx();
        (0..self.np())
            .map(|p| (0..nx).map(|x| self.spatial(v, p, x) * values[x] * self.mu[x]).sum())
            .collect()
    }

    /// max |ν_p Σ_x μ a_p(x,t) b_{p'}(x,t) − δ| for a dual pair of variants.
    pub fn orthonormality_defect(&self, theory: Theory, left: WaveVariant, right: WaveVariant, t: f64) -> QResult<f64> {
        let nx = self.nx();
        let mut worst: f64 = 0.0;
        for p in 0..self.np() {
            let a: Vec<Complex64> = (0..nx).map(|x| self.wave(theory, left, p, x, t)).collect::<QResult<_>>()?;
            for p2 in 0..self.np() {
                let mut s = Complex64::new(0.0, 0.0);
                for x in 0..nx {
                    s += self.mu[x] * a[x] * self.wave(theory, right, p2, x, t)?;
                }
                let want = if p == p2 { 1.0 } else { 0.0 };
                let scale = match theory {
                    Theory::Schrodinger => self.nu[p],
                    Theory::KleinGordon => {
                        self.nu[p] * 2.0 * self.frequency(theory, p)? / (self.physics.c * self.physics.c)
                    }
                };
                worst = worst.max((s * scale - want).norm());
            }
        }
        Ok(worst)
    }

    /// Klein-Gordon inner product block
    /// i c⁻² Σ_x μ [(φ*)_p(x,εt) ◁∂_t · φ_{p'}(x,ε't) + (φ*)_p(x,εt) · ∂_t▷φ_{p'}(x,ε't)]
    /// for ε, ε' ∈ {+, −}; ◁∂_t acts as −d/dt. Returns max |ν · block − ε δ δ_{εε'}|.
    pub fn kg_orthogonality_defect(&self, t: f64) -> QResult<f64> {
        let theory = Theory::KleinGordon;
        let c2 = self.physics.c * self.physics.c;
        let nx = self.nx();
        let mut worst: f64 = 0.0;
        for eps in [1.0, -1.0] {
            for eps2 in [1.0, -1.0] {
                for p in 0..self.np() {
                    let e = self.frequency(theory, p)?;
                    // d/dt of (φ*)_p(x, εt) = iεE · (φ*)_p(x, εt)
                    let left: Vec<Complex64> =
                        (0..nx).map(|x| self.wave(theory, WaveVariant::DualLower, p, x, eps * t)).collect::<QResult<_>>()?;
                    for p2 in 0..self.np() {
                        let e2 = self.frequency(theory, p2)?;
                        let mut s = Complex64::new(0.0, 0.0);
                        for x in 0..nx {
                            let r = self.wave(theory, WaveVariant::Lower, p2, x, eps2 * t)?;
                            let dl = Complex64::new(0.0, eps * e) * left[x];
                            let dr = Complex64::new(0.0, -eps2 * e2) * r;
                            s += self.mu[x] * (-dl * r + left[x] * dr);
                        }
                        let val = Complex64::new(0.0, 1.0) * s / c2 * self.nu[p];
                        let want = if p == p2 && eps == eps2 { eps } else { 0.0 };
                        worst = worst.max((val - want).norm());
                    }
                }
            }
        }
        Ok(worst)
    }
}
