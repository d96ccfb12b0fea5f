#![allow(dead_code)]

use num_complex::Complex64;
use num_rational::BigRational;
use qspace::lattice::{SpaceGrid, TimeAxis};
use qspace::scatter::{Potential, Profile};
use qspace::waves::{Physics, PlaneWaveFamily};
use std::sync::Arc;

pub fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// Family at q = 3/2 with `xs` position and `ps` momentum points per axis sign.
pub fn family(xs: i32, ps: i32, t1: f64, slices: usize) -> Arc<PlaneWaveFamily> {
    family_with(xs, ps, t1, slices, Physics::new(1.0, 1.0).unwrap())
}

pub fn family_with(xs: i32, ps: i32, t1: f64, slices: usize, physics: Physics) -> Arc<PlaneWaveFamily> {
    let q = rat(3, 2);
    let lo = -(xs / 2);
    let s = SpaceGrid::symmetric(q.clone(), rat(1, 1), lo, lo + xs - 1, 1).unwrap();
    let m = SpaceGrid::symmetric(q, rat(1, 1), 0, ps - 1, 1).unwrap();
    let t = TimeAxis::new(0.0, t1, slices).unwrap();
    Arc::new(PlaneWaveFamily::new(&s, &m, &t, physics).unwrap())
}

pub fn gaussian(f: &PlaneWaveFamily, strength: f64, width: f64) -> Potential {
    Potential::builtin(&Profile::Gaussian { strength, width }, &f.grid()).unwrap()
}

/// Potential switched on and off smoothly inside the window.
pub fn switched(f: &PlaneWaveFamily, v: &Potential) -> Potential {
    let (t0, t1) = (f.time.t0, f.time.t1());
    v.modulated(|t| (std::f64::consts::PI * (t - t0) / (t1 - t0)).sin().powi(2))
}

pub fn coeffs(n: usize) -> Vec<Complex64> {
    (0..n).map(|p| Complex64::new(1.0 / (1.0 + p as f64), 0.3 - 0.05 * p as f64)).collect()
}

pub fn ratio_within(hi: f64, lo: f64, want: f64, tol: f64) -> bool {
    let r = hi / lo;
    (r / want - 1.0).abs() <= tol
}
